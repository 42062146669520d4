#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "hhdmft/ed.hpp"
#include "hhdmft/errors.hpp"
#include "hhdmft/workbench.hpp"
#include "workbench/emit.hpp"

namespace hhdmft {

namespace {

using detail::Emitter;
using detail::Json;

Json poles_json(const Spectrum& s) {
  Json arr = Json::array();
  for (const auto& p : s.poles) arr.push_back({{"omega", p.omega}, {"weight", p.weight}});
  return arr;
}

Json chain_json(const KrylovChain& c) {
  return {{"kind", to_string(c.kind)}, {"depth", c.depth()}, {"a", c.a}, {"b2", c.b2},
          {"prefactor", c.prefactor},  {"e0", c.e0}};
}

Json config_echo(const std::string& ini) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(ini);
  pt::read_ini(in, tree);
  Json out = Json::object();
  for (const auto& [section, body] : tree) {
    Json sec = Json::object();
    for (const auto& [key, value] : body) sec[key] = value.data();
    out[section] = sec;
  }
  return out;
}

std::optional<double> innermost_gap(const Spectrum& s) {
  std::optional<double> above, below;
  for (const auto& p : s.poles) {
    if (p.omega > 0 && (!above || p.omega < *above)) above = p.omega;
    if (p.omega < 0 && (!below || p.omega > *below)) below = p.omega;
  }
  if (!above || !below) return std::nullopt;
  return *above - *below;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, Emitter& out) : cfg_(cfg), out_(out) {
    noise_ = cfg.noise;
    noise_.seed = cfg.seed;
  }

  void stage(const std::string& name, const std::function<void()>& fn) {
    current_ = name;
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    timing_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  const std::string& current_stage() const { return current_; }

  ModelParams model() const { return resolve_mu(cfg_.model, cfg_.mu_convention); }

  void ed() {
    stage("ed", [&] {
      const ModelParams p = model();
      const EigenSystem es = diagonalize(build_full_hamiltonian(p));
      const GroundState gs = ground_state(es);
      const Spectrum s = lehmann_greens(p);
      std::vector<std::vector<double>> levels;
      for (Eigen::Index i = 0; i < es.energies.size(); ++i)
        levels.push_back({static_cast<double>(i), es.energies(i)});
      out_.csv("ed_levels.csv", {"index", "energy"}, levels);
      std::vector<std::vector<double>> rows;
      for (const auto& pl : s.poles) rows.push_back({pl.omega, pl.weight});
      out_.csv("ed_poles.csv", {"omega", "weight"}, rows);
      Json r = {{"mu", p.mu},
                {"mu_convention", to_string(cfg_.mu_convention)},
                {"E0", gs.energy},
                {"degeneracy", gs.degeneracy},
                {"n_imp", impurity_occupation(p)},
                {"total_weight", s.total_weight()},
                {"poles", poles_json(s)}};
      if (const auto gap = innermost_gap(s)) r["gap"] = *gap;
      results_["ed"] = r;
    });
  }

  VqeResult vqe_ground_state(const ModelParams& p) {
    const std::optional<NoiseSpec> nz =
        cfg_.landscape_mode == EvalMode::Sampled ? std::optional<NoiseSpec>(noise_) : std::nullopt;
    return find_ground_state(p, cfg_.landscape, cfg_.landscape_mode, nz);
  }

  void vqe() {
    stage("vqe", [&] {
      const ModelParams p = model();
      const VqeResult v = vqe_ground_state(p);
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < cfg_.landscape.theta0_points; ++i) {
        for (int j = 0; j < cfg_.landscape.theta1_points; ++j) {
          rows.push_back({cfg_.landscape.theta0(i), cfg_.landscape.theta1(j), v.landscape(i, j)});
        }
      }
      out_.csv("landscape.csv", {"theta0", "theta1", "energy"}, rows);
      const double exact = diagonalize(to_matrix(build_pauli_hamiltonian(p))).energies(0);
      results_["vqe"] = {{"mu", p.mu},
                         {"mode", cfg_.landscape_mode == EvalMode::Exact ? "exact" : "sampled"},
                         {"grid_min_energy", v.grid_energy},
                         {"grid_theta0", v.grid_angles.theta0},
                         {"grid_theta1", v.grid_angles.theta1},
                         {"energy", v.energy},
                         {"theta0", v.angles.theta0},
                         {"theta1", v.angles.theta1},
                         {"ry_theta0", AnsatzAngles{2 * v.angles.theta0, 0}.canonical().theta0},
                         {"ry_theta1", AnsatzAngles{0, 2 * v.angles.theta1}.canonical().theta1},
                         {"exact_device_hamiltonian_E0", exact}};
    });
  }

  struct KvqaOutput {
    std::vector<KrylovResult> runs;
    Spectrum spectrum;
  };

  KvqaOutput kvqa_spectrum(const ModelParams& p) {
    const PauliSum h = build_full_pauli_hamiltonian(p);
    QuantumState gs;
    if (cfg_.krylov_ground_state == GroundStateSource::Vqe) {
      gs = vqe_ground_state(p).state;
    } else {
      const GroundState g = ground_state(diagonalize(to_matrix(h)));
      if (g.degeneracy > 1) throw DegeneracyError("degenerate ground state");
      gs = QuantumState::normalized(g.vector);
    }
    const std::optional<NoiseSpec> nz =
        cfg_.krylov.mode == KrylovMode::VariationalSampled ? std::optional<NoiseSpec>(noise_) : std::nullopt;
    KvqaOutput o;
    auto run_kind = [&](ChainKind k) {
      o.runs.push_back(krylov_chain(gs, h, k, cfg_.krylov_depth, cfg_.krylov, nz));
      for (const auto& d : o.runs.back().diagnostics) diagnostics_.push_back(d);
      return poles_weights(o.runs.back().chain);
    };
    switch (cfg_.krylov_side) {
      case SpectrumSide::Hole:
        o.spectrum = assemble_particle_hole(run_kind(ChainKind::Hole));
        break;
      case SpectrumSide::Particle:
        o.spectrum = assemble_particle_hole(run_kind(ChainKind::Particle));
        break;
      case SpectrumSide::Both: {
        const Spectrum part = run_kind(ChainKind::Particle);
        o.spectrum = combine(part, run_kind(ChainKind::Hole));
        break;
      }
    }
    return o;
  }

  void kvqa() {
    stage("kvqa", [&] {
      const ModelParams p = model();
      const KvqaOutput o = kvqa_spectrum(p);
      std::vector<std::vector<std::string>> chain_rows, step_rows, surface_rows;
      Json chains = Json::array();
      for (const auto& r : o.runs) {
        const std::string kind = to_string(r.chain.kind);
        for (std::size_t n = 0; n < r.chain.a.size(); ++n) {
          chain_rows.push_back({kind, std::to_string(n), detail::num(r.chain.a[n]),
                                n < r.chain.b2.size() ? detail::num(r.chain.b2[n]) : ""});
        }
        Json steps = Json::array();
        for (const auto& st : r.steps) {
          const std::string alt0 = st.alternate ? detail::num(st.alternate->theta0) : "";
          const std::string alt1 = st.alternate ? detail::num(st.alternate->theta1) : "";
          const std::string altc = st.alternate ? detail::num(st.alternate_cost) : "";
          step_rows.push_back({kind, std::to_string(st.n), detail::num(st.angles.theta0),
                               detail::num(st.angles.theta1), detail::num(st.cost), detail::num(st.eps.e0),
                               detail::num(st.eps.e1), detail::num(st.eps.e2), alt0, alt1, altc});
          for (int i = 0; i < st.surface.rows(); ++i) {
            for (int j = 0; j < st.surface.cols(); ++j) {
              surface_rows.push_back({kind, std::to_string(st.n), detail::num(cfg_.krylov.grid.theta0(i)),
                                      detail::num(cfg_.krylov.grid.theta1(j)),
                                      detail::num(st.surface(i, j))});
            }
          }
          Json sj = {
              {"n", st.n}, {"theta0", st.angles.theta0}, {"theta1", st.angles.theta1}, {"cost", st.cost}};
          if (st.alternate) {
            sj["alternate"] = {{"theta0", st.alternate->theta0},
                               {"theta1", st.alternate->theta1},
                               {"cost", st.alternate_cost}};
          }
          steps.push_back(sj);
        }
        Json cj = chain_json(r.chain);
        cj["termination"] = to_string(r.termination);
        cj["steps"] = steps;
        chains.push_back(cj);
      }
      out_.csv_text("kvqa_chain.csv", {"kind", "n", "a", "b2"}, chain_rows);
      if (cfg_.krylov.mode != KrylovMode::Direct) {
        out_.csv_text("kvqa_steps.csv",
                      {"kind", "n", "theta0", "theta1", "cost", "eps0", "eps1", "eps2", "alt_theta0",
                       "alt_theta1", "alt_cost"},
                      step_rows);
        out_.csv_text("kvqa_surfaces.csv", {"kind", "n", "theta0", "theta1", "cost"}, surface_rows);
      }
      std::vector<std::vector<double>> poles;
      for (const auto& pl : o.spectrum.poles) poles.push_back({pl.omega, pl.weight});
      out_.csv("kvqa_poles.csv", {"omega", "weight"}, poles);
      results_["kvqa"] = {{"mu", p.mu},
                          {"mode", to_string(cfg_.krylov.mode)},
                          {"ground_state", to_string(cfg_.krylov_ground_state)},
                          {"side", to_string(cfg_.krylov_side)},
                          {"b2_floor", cfg_.krylov.effective_b2_floor()},
                          {"chains", chains},
                          {"poles", poles_json(o.spectrum)}};
    });
  }

  void spectrum() {
    stage("spectrum", [&] {
      const ModelParams p = model();
      const Spectrum s =
          cfg_.spectrum_source == SpectrumSource::Ed ? lehmann_greens(p) : kvqa_spectrum(p).spectrum;
      const SpectralCurve c = spectral_function(s, cfg_.spectrum);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < c.omega.size(); ++i)
        rows.push_back({c.omega[i], c.A[i], c.ReG[i], c.ImG[i]});
      out_.csv("spectrum.csv", {"omega", "A", "ReG", "ImG"}, rows);
      Json r = {{"mu", p.mu},
                {"source", cfg_.spectrum_source == SpectrumSource::Ed ? "ed" : "kvqa"},
                {"delta", cfg_.spectrum.delta},
                {"total_weight", s.total_weight()},
                {"poles", poles_json(s)}};
      if (const auto gap = innermost_gap(s)) r["gap"] = *gap;
      results_["spectrum"] = r;
    });
  }

  void dmft(std::optional<DmftAction> action_override) {
    const DmftAction action = action_override.value_or(cfg_.dmft_action);
    DmftConfig dc = cfg_.dmft;
    dc.search = cfg_.krylov;
    dc.mu_convention = cfg_.mu_convention;
    const std::optional<NoiseSpec> nz =
        dc.solver == ImpuritySolver::KvqaSampled ? std::optional<NoiseSpec>(noise_) : std::nullopt;
    Json r = {
        {"solver", to_string(dc.solver)}, {"z_method", to_string(dc.effective_z_method())}, {"m2", dc.m2}};
    if (action != DmftAction::Iterate) {
      stage("dmft_scan", [&] {
        std::vector<double> vs;
        for (int k = 0; k < cfg_.scan_points; ++k) {
          vs.push_back(cfg_.scan_v_min + (cfg_.scan_v_max - cfg_.scan_v_min) * k / (cfg_.scan_points - 1));
        }
        const auto scan = dmft_scan(cfg_.model, dc, vs, nz);
        std::vector<std::vector<double>> rows;
        for (const auto& pt : scan) rows.push_back({pt.V, pt.Z, pt.sqrt_zm2});
        out_.csv("dmft_scan.csv", {"V", "Z", "sqrtZM2"}, rows);
        const auto cross = scan_crossing(scan);
        r["scan_crossing"] = cross ? Json(*cross) : Json(nullptr);
      });
    }
    if (action != DmftAction::Scan) {
      stage("dmft_iterate", [&] {
        const DmftResult res = run_dmft(cfg_.model, dc, nz);
        Json hist = Json::array();
        for (const auto& it : res.history) {
          hist.push_back({{"V", it.V}, {"mu", it.mu}, {"Z", it.Z}, {"V_next", it.v_next}});
        }
        out_.json("dmft_history.json", {{"converged", res.converged},
                                        {"v_star", res.v_star},
                                        {"z_star", res.z_star},
                                        {"mixing", dc.mixing},
                                        {"tol", dc.tol},
                                        {"history", hist}});
        r["converged"] = res.converged;
        r["v_star"] = res.v_star;
        r["z_star"] = res.z_star;
        r["iterations"] = res.history.size();
        for (const auto& d : res.diagnostics) diagnostics_.push_back(d);
      });
    }
    results_["dmft"] = r;
  }

  TermOrdering ordering(const ModelParams& p) const {
    return cfg_.ordering.empty() ? TermOrdering{}
                                 : parse_ordering(cfg_.ordering, build_full_pauli_hamiltonian(p).size());
  }

  static double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }

  std::vector<double> times() const {
    std::vector<double> t;
    for (int i = 0; i <= cfg_.time.n_steps; ++i) t.push_back(cfg_.time.t(i));
    return t;
  }

  void trotter() {
    stage("trotter", [&] {
      const ModelParams p = model();
      const auto exact = greens_time(p, cfg_.time, {TimeBackend::Exact, cfg_.n_t, {}, 0});
      const auto trot = greens_time(p, cfg_.time, {TimeBackend::Trotter, cfg_.n_t, ordering(p), 0});
      const auto t = times();
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], trot[i], exact[i]});
      out_.csv("trotter.csv", {"t", "ImG_trotter", "ImG_exact"}, rows);
      results_["trotter"] = {{"mu", p.mu},
                             {"n_t_per_unit_time", cfg_.n_t},
                             {"ordering", cfg_.ordering.empty() ? "default" : cfg_.ordering},
                             {"max_deviation", max_deviation(trot, exact)}};
    });
  }

  void vha() {
    stage("vha", [&] {
      const ModelParams p = model();
      const auto exact = greens_time(p, cfg_.time, {TimeBackend::Exact, cfg_.n_t, {}, 0});
      const VhaResult v = vha_evolve(p, cfg_.time, cfg_.vha_layers, ordering(p));
      const auto t = times();
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], v.img[i], exact[i]});
      out_.csv("vha.csv", {"t", "ImG_vha", "ImG_exact"}, rows);
      std::vector<std::string> header = {"t"};
      for (Eigen::Index k = 0; k < v.forward.thetas.cols(); ++k) header.push_back(fmt::format("theta{}", k));
      std::vector<std::vector<double>> traj;
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row = {t[i]};
        for (Eigen::Index k = 0; k < v.forward.thetas.cols(); ++k)
          row.push_back(v.forward.thetas(static_cast<Eigen::Index>(i), k));
        traj.push_back(row);
      }
      out_.csv("vha_trajectory.csv", header, traj);
      results_["vha"] = {{"mu", p.mu},
                         {"layers", cfg_.vha_layers},
                         {"ordering", cfg_.ordering.empty() ? "default" : cfg_.ordering},
                         {"max_deviation", max_deviation(v.img, exact)},
                         {"max_residual", std::max(v.forward.max_residual, v.backward.max_residual)}};
    });
  }

  void compare() {
    stage("compare", [&] {
      const ModelParams p = model();
      const auto exact = greens_time(p, cfg_.time, {TimeBackend::Exact, cfg_.n_t, {}, 0});
      const auto trot = greens_time(p, cfg_.time, {TimeBackend::Trotter, cfg_.n_t, ordering(p), 0});
      const Spectrum s = kvqa_spectrum(p).spectrum;
      const auto t = times();
      std::vector<double> kv;
      for (double ti : t) {
        double g = 0.0;
        for (const auto& pl : s.poles) g -= pl.weight * std::cos(pl.omega * ti);
        kv.push_back(g);
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], exact[i], trot[i], kv[i]});
      out_.csv("compare.csv", {"t", "ImG_exact", "ImG_trotter", "ImG_kvqa"}, rows);
      results_["compare"] = {{"mu", p.mu},
                             {"max_deviation_trotter", max_deviation(trot, exact)},
                             {"max_deviation_kvqa", max_deviation(kv, exact)},
                             {"kvqa_poles", poles_json(s)}};
    });
  }

  void plots(const std::string& subcommand) {
    std::string body;
    auto add = [&](const std::string& file, const std::string& x, const std::vector<std::string>& ys) {
      body += fmt::format("d = np.genfromtxt(os.path.join(here, '{}'), delimiter=',', names=True)\n", file);
      body += "plt.figure()\n";
      for (const auto& y : ys) body += fmt::format("plt.plot(d['{}'], d['{}'], label='{}')\n", x, y, y);
      body += fmt::format("plt.xlabel('{}')\nplt.legend()\nplt.savefig(os.path.join(here, '{}.png'))\n\n", x,
                          file.substr(0, file.size() - 4));
    };
    if (subcommand == "spectrum") add("spectrum.csv", "omega", {"A"});
    if (subcommand == "trotter") add("trotter.csv", "t", {"ImG_trotter", "ImG_exact"});
    if (subcommand == "vha") add("vha.csv", "t", {"ImG_vha", "ImG_exact"});
    if (subcommand == "compare") add("compare.csv", "t", {"ImG_exact", "ImG_trotter", "ImG_kvqa"});
    if (subcommand == "dmft" && results_["dmft"].contains("scan_crossing"))
      add("dmft_scan.csv", "V", {"V", "sqrtZM2"});
    if (subcommand == "ed") add("ed_poles.csv", "omega", {"weight"});
    if (subcommand == "kvqa") add("kvqa_poles.csv", "omega", {"weight"});
    if (subcommand == "vqe") {
      body +=
          "d = np.genfromtxt(os.path.join(here, 'landscape.csv'), delimiter=',', names=True)\n"
          "n0 = len(np.unique(d['theta0']))\n"
          "e = d['energy'].reshape(n0, -1)\n"
          "plt.figure()\n"
          "plt.imshow(e.T, origin='lower', aspect='auto', extent=[d['theta0'].min(), d['theta0'].max(), "
          "d['theta1'].min(), d['theta1'].max()])\n"
          "plt.colorbar()\nplt.xlabel('theta0')\nplt.ylabel('theta1')\n"
          "plt.savefig(os.path.join(here, 'landscape.png'))\n";
    }
    out_.text("plot.py",
              "import os\n\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n"
              "import numpy as np\n\nhere = os.path.dirname(os.path.abspath(__file__))\n\n" +
                  body);
  }

  Json manifest(const std::string& subcommand) const {
    const std::string ini = render_config(cfg_);
    Json m = {{"tool", "hhdmft"},           {"subcommand", subcommand},
              {"config", config_echo(ini)}, {"config_hash", git_blob_hash(ini)},
              {"results", results_},        {"diagnostics", diagnostics_}};
    std::vector<std::string> names = out_.file_names();
    names.push_back("manifest.json");
    m["files"] = names;
    Json t = Json::object();
    for (const auto& [k, v] : timing_) t[k] = v;
    m["timing_seconds"] = t;
    return m;
  }

 private:
  const RunConfig& cfg_;
  Emitter& out_;
  NoiseSpec noise_;
  std::string current_ = "setup";
  Json results_ = Json::object();
  std::vector<std::string> diagnostics_;
  std::map<std::string, double> timing_;
};

}  // namespace

RunOutcome run(const std::string& subcommand, const RunConfig& cfg) {
  RunOutcome outcome;
  std::string sub = subcommand;
  std::optional<DmftAction> action;
  if (sub == "dmft-scan") {
    sub = "dmft";
    action = DmftAction::Scan;
  } else if (sub == "dmft-iterate") {
    sub = "dmft";
    action = DmftAction::Iterate;
  }
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), sub) == std::end(kSubcommands)) {
    return {2, fmt::format("unknown subcommand '{}'", subcommand), {}};
  }
  std::optional<Emitter> out;
  std::string stage = "setup";
  try {
    cfg.validate();
    out.emplace(cfg.output_dir);
    Runner r(cfg, *out);
    auto tracked = [&](auto&& fn) {
      fn();
      stage = r.current_stage();
    };
    try {
      if (sub == "ed")
        tracked([&] { r.ed(); });
      else if (sub == "vqe")
        tracked([&] { r.vqe(); });
      else if (sub == "kvqa")
        tracked([&] { r.kvqa(); });
      else if (sub == "spectrum")
        tracked([&] { r.spectrum(); });
      else if (sub == "dmft")
        tracked([&] { r.dmft(action); });
      else if (sub == "trotter")
        tracked([&] { r.trotter(); });
      else if (sub == "vha")
        tracked([&] { r.vha(); });
      else if (sub == "compare")
        tracked([&] { r.compare(); });
      if (cfg.emit_plots) r.plots(sub);
      out->json("manifest.json", r.manifest(sub));
    } catch (...) {
      stage = r.current_stage();
      throw;
    }
    outcome.files = out->files();
    outcome.message = fmt::format("{} finished; artifacts in {}", sub, cfg.output_dir);
    return outcome;
  } catch (const ConfigError& e) {
    outcome = {2, fmt::format("config error: {}", e.what()), {}};
  } catch (const InvalidArgument& e) {
    outcome = {2, fmt::format("[{}] invalid input: {}", stage, e.what()), {}};
  } catch (const UnsupportedConfiguration& e) {
    outcome = {2, fmt::format("[{}] unsupported configuration: {}", stage, e.what()), {}};
  } catch (const IoError& e) {
    outcome = {4, fmt::format("[{}] I/O error: {}", stage, e.what()), {}};
  } catch (const std::exception& e) {
    outcome = {3, fmt::format("[{}] numerical failure: {}", stage, e.what()), {}};
  }
  if (out) out->rollback();
  return outcome;
}

}  // namespace hhdmft
