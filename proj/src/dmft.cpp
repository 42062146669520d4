#include "hhdmft/dmft.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

#include "hhdmft/ed.hpp"
#include "hhdmft/errors.hpp"
#include "hhdmft/greens.hpp"
#include "hhdmft/vqe.hpp"

namespace hhdmft {

std::string to_string(ImpuritySolver s) {
  switch (s) {
    case ImpuritySolver::ExactLanczos:
      return "exact-lanczos";
    case ImpuritySolver::KvqaDirect:
      return "kvqa-direct";
    case ImpuritySolver::KvqaVariational:
      return "kvqa-variational";
    case ImpuritySolver::KvqaSampled:
      return "kvqa-sampled";
  }
  return "?";
}

ImpuritySolver impurity_solver_from_string(const std::string& s) {
  if (s == "exact-lanczos") return ImpuritySolver::ExactLanczos;
  if (s == "kvqa-direct") return ImpuritySolver::KvqaDirect;
  if (s == "kvqa-variational") return ImpuritySolver::KvqaVariational;
  if (s == "kvqa-sampled") return ImpuritySolver::KvqaSampled;
  throw InvalidArgument(fmt::format("unknown impurity solver '{}'", s));
}

std::string to_string(ZMethod m) {
  switch (m) {
    case ZMethod::Auto:
      return "auto";
    case ZMethod::Peaks:
      return "peaks";
    case ZMethod::Derivative:
      return "derivative";
  }
  return "?";
}

ZMethod z_method_from_string(const std::string& s) {
  if (s == "auto") return ZMethod::Auto;
  if (s == "peaks") return ZMethod::Peaks;
  if (s == "derivative") return ZMethod::Derivative;
  throw InvalidArgument(fmt::format("unknown Z method '{}'", s));
}

void DmftConfig::validate() const {
  if (!(m2 > 0.0)) throw InvalidArgument("m2 must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw InvalidArgument("mixing must lie in (0, 1]");
  if (!(v_initial > 0.0)) throw InvalidArgument("v_initial must be positive");
  if (depth < 0) throw InvalidArgument("depth must be non-negative");
  if (!(derivative_step > 0.0) || !(derivative_eta > 0.0)) {
    throw InvalidArgument("derivative step and eta must be positive");
  }
}

ZMethod DmftConfig::effective_z_method() const {
  if (z_method != ZMethod::Auto) return z_method;
  return solver == ImpuritySolver::KvqaSampled ? ZMethod::Peaks : ZMethod::Derivative;
}

double quasiparticle_weight_peaks(const Spectrum& s, std::vector<std::string>* warnings) {
  if (s.poles.empty()) throw InvalidArgument("empty spectrum");
  const Pole* above = nullptr;
  const Pole* below = nullptr;
  for (const auto& p : s.poles) {
    if (p.omega > 0.0 && (!above || p.omega < above->omega)) above = &p;
    if (p.omega < 0.0 && (!below || p.omega > below->omega)) below = &p;
  }
  double z = 0.0;
  if (above) z += above->weight;
  if (below) z += below->weight;
  if (!above || !below) {
    const std::string msg = fmt::format("quasiparticle weight from one side only (Z = {})", z);
    spdlog::warn(msg);
    if (warnings) warnings->push_back(msg);
  }
  return z;
}

cplx bare_greens(double V, cplx z) {
  if (z == 0.0) throw InvalidArgument("bare Green's function is singular at z = 0");
  return 1.0 / (z - V * V / z);
}

double quasiparticle_weight_derivative(const Spectrum& g, double V, double h, double eta) {
  auto sigma = [&](double w) {
    const cplx z(w, eta);
    return 1.0 / bare_greens(V, z) - 1.0 / greens(g, z);
  };
  const double dsigma = ((sigma(h) - sigma(-h)) / (2.0 * h)).real();
  const double denom = 1.0 - dsigma;
  if (std::abs(denom) < 1e-8) throw DivergentWeightError("1 - Re Sigma'(0) vanishes");
  return 1.0 / denom;
}

double update_hybridization(double Z, double m2) {
  if (!(Z > 0.0)) throw InvalidArgument(fmt::format("quasiparticle weight {} is not positive", Z));
  if (!(m2 > 0.0)) throw InvalidArgument("m2 must be positive");
  return std::sqrt(Z * m2);
}

namespace {

Spectrum sides_to_spectrum(const QuantumState& gs, const PauliSum& h, SpectrumSide side, int depth,
                           const KrylovSearchConfig& search, const std::optional<NoiseSpec>& noise,
                           std::vector<std::string>* diagnostics) {
  auto run = [&](ChainKind kind) {
    KrylovResult r = krylov_chain(gs, h, kind, depth, search, noise);
    if (diagnostics) diagnostics->insert(diagnostics->end(), r.diagnostics.begin(), r.diagnostics.end());
    return poles_weights(r.chain);
  };
  switch (side) {
    case SpectrumSide::Both:
      return combine(run(ChainKind::Particle), run(ChainKind::Hole));
    case SpectrumSide::Particle:
      return assemble_particle_hole(run(ChainKind::Particle));
    case SpectrumSide::Hole:
      return assemble_particle_hole(run(ChainKind::Hole));
  }
  return {};
}

}  // namespace

Spectrum solve_impurity(const ModelParams& p, const DmftConfig& cfg, const std::optional<NoiseSpec>& noise,
                        std::vector<std::string>* diagnostics) {
  switch (cfg.solver) {
    case ImpuritySolver::ExactLanczos: {
      const Eigen::MatrixXcd h = build_full_hamiltonian(p);
      const GroundState gs = ground_state(diagonalize(h));
      if (gs.degeneracy > 1) throw DegeneracyError("degenerate ground state in impurity solve");
      const Eigen::MatrixXcd c = impurity_annihilation_matrix(0, p.n_boson_levels);
      const int full = static_cast<int>(h.rows());
      KrylovChain part = reference_lanczos(h, c.adjoint() * gs.vector, full);
      part.e0 = gs.energy;
      part.kind = ChainKind::Particle;
      KrylovChain hole = reference_lanczos(h, c * gs.vector, full);
      hole.e0 = gs.energy;
      hole.kind = ChainKind::Hole;
      return combine(poles_weights(part), poles_weights(hole));
    }
    case ImpuritySolver::KvqaDirect: {
      const PauliSum h = build_full_pauli_hamiltonian(p);
      const GroundState gs = ground_state(diagonalize(to_matrix(h)));
      if (gs.degeneracy > 1) throw DegeneracyError("degenerate ground state in impurity solve");
      KrylovSearchConfig search = cfg.search;
      search.mode = KrylovMode::Direct;
      search.b2_floor.reset();
      return sides_to_spectrum(QuantumState::normalized(gs.vector), h, SpectrumSide::Both,
                               static_cast<int>(to_matrix(h).rows()), search, std::nullopt, diagnostics);
    }
    case ImpuritySolver::KvqaVariational:
    case ImpuritySolver::KvqaSampled: {
      const bool sampled = cfg.solver == ImpuritySolver::KvqaSampled;
      if (sampled && !noise) throw InvalidArgument("kvqa-sampled solver requires a noise spec");
      const EvalMode mode = sampled ? EvalMode::Sampled : EvalMode::Exact;
      const VqeResult vqe = find_ground_state(p, cfg.search.grid, mode, noise);
      KrylovSearchConfig search = cfg.search;
      search.mode = sampled ? KrylovMode::VariationalSampled : KrylovMode::VariationalExact;
      return sides_to_spectrum(vqe.state, build_full_pauli_hamiltonian(p), cfg.side, cfg.depth, search, noise,
                               diagnostics);
    }
  }
  return {};
}

DmftIteration evaluate_z(ModelParams p, double V, const DmftConfig& cfg,
                         const std::optional<NoiseSpec>& noise, std::vector<std::string>* diagnostics) {
  p.V = V;
  p = resolve_mu(p, cfg.mu_convention);
  const Spectrum s = solve_impurity(p, cfg, noise, diagnostics);
  DmftIteration it;
  it.V = V;
  it.mu = p.mu;
  it.Z = cfg.effective_z_method() == ZMethod::Peaks
             ? quasiparticle_weight_peaks(s, diagnostics)
             : quasiparticle_weight_derivative(s, V, cfg.derivative_step, cfg.derivative_eta);
  return it;
}

DmftResult run_dmft(const ModelParams& p, const DmftConfig& cfg, const std::optional<NoiseSpec>& noise) {
  cfg.validate();
  DmftResult r;
  double v = cfg.v_initial;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    std::optional<NoiseSpec> nz = noise;
    if (nz) nz->seed = mix_seed(noise->seed, static_cast<std::uint64_t>(iter));
    DmftIteration it = evaluate_z(p, v, cfg, nz, &r.diagnostics);
    it.v_next = (1.0 - cfg.mixing) * v + cfg.mixing * update_hybridization(it.Z, cfg.m2);
    r.history.push_back(it);
    r.v_star = it.V;
    r.z_star = it.Z;
    const bool small_step = std::abs(it.v_next - v) < cfg.tol;
    const bool fixed_point = std::abs(it.V * it.V - it.Z * cfg.m2) <= 2.0 * cfg.tol * it.V;
    if (small_step && fixed_point) {
      r.converged = true;
      break;
    }
    v = it.v_next;
  }
  return r;
}

std::vector<ScanPoint> dmft_scan(const ModelParams& p, const DmftConfig& cfg,
                                 const std::vector<double>& v_values, const std::optional<NoiseSpec>& noise) {
  cfg.validate();
  std::vector<ScanPoint> out;
  for (std::size_t k = 0; k < v_values.size(); ++k) {
    std::optional<NoiseSpec> nz = noise;
    if (nz) nz->seed = mix_seed(noise->seed, 1000 + k);
    const DmftIteration it = evaluate_z(p, v_values[k], cfg, nz);
    out.push_back({it.V, it.Z, std::sqrt(std::max(0.0, it.Z) * cfg.m2)});
  }
  return out;
}

std::optional<double> scan_crossing(const std::vector<ScanPoint>& scan) {
  for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
    const double d0 = scan[k].V - scan[k].sqrt_zm2;
    const double d1 = scan[k + 1].V - scan[k + 1].sqrt_zm2;
    if (d0 == 0.0) return scan[k].V;
    if ((d0 < 0.0) != (d1 < 0.0)) {
      return scan[k].V + (scan[k + 1].V - scan[k].V) * d0 / (d0 - d1);
    }
  }
  if (!scan.empty() && scan.back().V - scan.back().sqrt_zm2 == 0.0) return scan.back().V;
  return std::nullopt;
}

}  // namespace hhdmft
