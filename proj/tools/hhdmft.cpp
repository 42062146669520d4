#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "hhdmft/errors.hpp"
#include "hhdmft/workbench.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> shots;
  std::optional<double> readout_flip;
  bool scan = false;
  bool iterate = false;
  std::optional<int> nt;
  std::optional<std::string> ordering;
  bool emit_plots = false;
};

void apply(const std::string& sub, const Overrides& o, hhdmft::RunConfig& cfg) {
  using namespace hhdmft;
  if (o.out) cfg.output_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.shots) cfg.noise.shots = *o.shots;
  if (o.readout_flip) cfg.noise.readout_flip = *o.readout_flip;
  if (o.nt) {
    if (sub == "vha")
      cfg.vha_layers = *o.nt;
    else
      cfg.n_t = *o.nt;
  }
  if (o.ordering) cfg.ordering = *o.ordering;
  if (o.emit_plots) cfg.emit_plots = true;
  if (o.scan && o.iterate)
    cfg.dmft_action = DmftAction::Both;
  else if (o.scan)
    cfg.dmft_action = DmftAction::Scan;
  else if (o.iterate)
    cfg.dmft_action = DmftAction::Iterate;
  if (o.mode) {
    const bool sampled = *o.mode == "sampled";
    cfg.landscape_mode = sampled ? EvalMode::Sampled : EvalMode::Exact;
    if (sub == "kvqa" || sub == "compare" ||
        (sub == "spectrum" && cfg.spectrum_source == SpectrumSource::Kvqa)) {
      cfg.krylov.mode = sampled ? KrylovMode::VariationalSampled : KrylovMode::VariationalExact;
    }
    if (sub == "dmft")
      cfg.dmft.solver = sampled ? ImpuritySolver::KvqaSampled : ImpuritySolver::KvqaVariational;
  }
}

std::string describe(const std::string& sub) {
  if (sub == "ed") return "exact diagonalization: levels, Lehmann poles, gap";
  if (sub == "trotter") return "Im G(t) by first-order Trotter against exact evolution";
  if (sub == "vqe") return "two-angle VQE energy landscape and ground state";
  if (sub == "kvqa") return "Krylov chain and poles from the VQE or exact ground state";
  if (sub == "spectrum") return "broadened spectral function from ED or KVQA poles";
  if (sub == "dmft") return "two-site DMFT scan and fixed-point iteration";
  if (sub == "vha") return "Im G(t) by the variational Hamiltonian ansatz";
  return "exact, Trotter and KVQA Im G(t) side by side";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hubbard-Holstein two-site DMFT workbench"};
  app.require_subcommand(1);
  Overrides o;
  for (const char* name : hhdmft::kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--mode", o.mode, "evaluation mode")->check(CLI::IsMember({"exact", "sampled"}));
    sub->add_option("--shots", o.shots, "measurement shots per term");
    sub->add_option("--readout-flip", o.readout_flip, "readout bit-flip probability");
    sub->add_flag("--emit-plots", o.emit_plots, "write plot.py next to the data");
    const std::string s = name;
    if (s == "dmft") {
      sub->add_flag("--scan", o.scan, "scan V and tabulate sqrt(Z*M2)");
      sub->add_flag("--iterate", o.iterate, "run the damped fixed-point iteration");
    }
    if (s == "trotter" || s == "vha" || s == "compare") {
      sub->add_option("--nt", o.nt, s == "vha" ? "ansatz layers" : "Trotter steps per unit time");
      sub->add_option("--ordering", o.ordering, "comma-separated term permutation");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  hhdmft::RunConfig cfg;
  try {
    if (!o.config.empty()) cfg = hhdmft::load_config(o.config);
    apply(sub, o, cfg);
  } catch (const hhdmft::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  const hhdmft::RunOutcome r = hhdmft::run(sub, cfg);
  (r.exit_code == 0 ? std::cout : std::cerr) << r.message << '\n';
  return r.exit_code;
}
