#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hhdmft/dmft.hpp"
#include "hhdmft/ed.hpp"
#include "hhdmft/greens.hpp"
#include "hhdmft/kvqa.hpp"
#include "hhdmft/model.hpp"
#include "hhdmft/pauli.hpp"
#include "hhdmft/statevector.hpp"
#include "hhdmft/time_evolution.hpp"
#include "hhdmft/vqe.hpp"
#include "hhdmft/workbench.hpp"

using namespace hhdmft;

namespace {

struct Check {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "!") + note);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sample_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

std::optional<double> innermost_gap(const Spectrum& s) {
  std::optional<double> lo, hi;
  for (const auto& p : s.poles) {
    if (p.omega < 0 && (!lo || p.omega > *lo)) lo = p.omega;
    if (p.omega > 0 && (!hi || p.omega < *hi)) hi = p.omega;
  }
  if (!lo || !hi) return std::nullopt;
  return *hi - *lo;
}

std::vector<Pole> poles_in(const Spectrum& s, double lo, double hi) {
  std::vector<Pole> out;
  for (const auto& p : s.poles) {
    if (p.omega >= lo && p.omega <= hi) out.push_back(p);
  }
  return out;
}

ModelParams representative() { return resolve_mu(ModelParams{}, RunConfig{}.mu_convention); }

Check exact_ground_energy() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const MuConvention shipped = RunConfig{}.mu_convention;
  bool shipped_ok = false;
  for (MuConvention conv : {MuConvention::HalfU, MuConvention::HalfFilling}) {
    const ModelParams p = resolve_mu(ModelParams{}, conv);
    const double e0 = ground_state(diagonalize(build_full_hamiltonian(p))).energy;
    const bool ok = std::abs(e0 - (-2.62)) <= 0.03;
    c.notes.push_back(
        fmt::format("mu={} ({}): E0={:.5f} {}", to_string(conv), p.mu, e0, ok ? "matches" : "misses"));
    if (conv == shipped) shipped_ok = ok;
  }
  c.require(shipped_ok, fmt::format("shipped default mu convention '{}' matches", to_string(shipped)));
  const double dt = seconds_since(t0);
  c.require(dt < 1.0, fmt::format("runtime {:.3f}s < 1s", dt));
  return c;
}

Check vqe_landscape() {
  Check c;
  const ModelParams p = representative();
  const auto t0 = std::chrono::steady_clock::now();
  const LandscapeGrid grid;
  const Eigen::MatrixXd e = energy_landscape(build_pauli_hamiltonian(p), grid, EvalMode::Exact);
  const double dt = seconds_since(t0);
  const double e_min = e.minCoeff();
  const double e0 = ground_state(diagonalize(build_full_hamiltonian(p))).energy;
  c.require(grid.theta0_points == 64 && grid.theta1_points == 64, "64x64 grid");
  c.require(std::abs(e_min - (-2.58)) <= 0.03, fmt::format("minimum {:.5f} vs -2.58 +- 0.03", e_min));
  c.require(e_min >= e0, fmt::format("every node >= exact E0 {:.5f}", e0));
  c.require(dt < 10.0, fmt::format("runtime {:.3f}s < 10s", dt));
  return c;
}

Check exact_spectrum_anchors() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum s = lehmann_greens(representative());
  const double dt = seconds_since(t0);
  const double total = s.total_weight();
  const auto gap = innermost_gap(s);
  c.require(gap && std::abs(*gap - 1.25) <= 0.05,
            fmt::format("gap {:.4f} vs 1.25 +- 0.05", gap.value_or(0.0)));
  const auto sat_lo = poles_in(s, -3.0, -2.6);
  const auto sat_hi = poles_in(s, 2.6, 3.0);
  c.require(!sat_lo.empty() && !sat_hi.empty(),
            fmt::format("satellites at {:.3f} / {:.3f} vs +-2.8 +- 0.2",
                        sat_lo.empty() ? NAN : sat_lo[0].omega, sat_hi.empty() ? NAN : sat_hi[0].omega));
  auto weak = [&](const std::vector<Pole>& ps) {
    return std::any_of(ps.begin(), ps.end(), [&](const Pole& p) { return p.weight / total < 0.01; });
  };
  const bool pair = weak(poles_in(s, -6.2, -4.8)) && weak(poles_in(s, 4.8, 6.2));
  std::string outer;
  for (const auto& p : s.poles) {
    if (std::abs(p.omega) > 4.0) outer += fmt::format(" {:.3f}({:.2f}%)", p.omega, 100 * p.weight / total);
  }
  c.require(pair, "pole pair below 1% weight within +-(5.5 +- 0.7); outer poles:" + outer);
  c.require(dt < 1.0, fmt::format("runtime {:.3f}s < 1s", dt));
  return c;
}

Check dmft_fixed_point() {
  Check c;
  const ModelParams p;
  const DmftConfig exact;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> vs;
  for (int k = 0; k < 20; ++k) vs.push_back(0.5 + 0.6 * k / 19.0);
  const auto scan = dmft_scan(p, exact, vs);
  const double dt = seconds_since(t0);
  const auto cross = scan_crossing(scan);
  const DmftResult r = run_dmft(p, exact);
  c.require(r.converged && std::abs(r.v_star - 0.79) <= 0.02,
            fmt::format("exact-lanczos V*={:.5f} after {} iterations", r.v_star, r.history.size()));
  c.require(cross && std::abs(*cross - r.v_star) <= 0.02,
            fmt::format("scan crossing {:.5f} vs V* within 0.02", cross.value_or(NAN)));
  DmftConfig direct;
  direct.solver = ImpuritySolver::KvqaDirect;
  const DmftResult d = run_dmft(p, direct);
  c.require(d.converged && std::abs(d.v_star - r.v_star) <= 0.02,
            fmt::format("kvqa-direct V*={:.5f}", d.v_star));
  c.require(dt < 30.0, fmt::format("20-point scan {:.3f}s < 30s", dt));
  return c;
}

Check lanczos_lehmann() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = representative();
  const Eigen::MatrixXcd h = build_full_hamiltonian(p);
  const GroundState gs = ground_state(diagonalize(h));
  const Eigen::MatrixXcd cu = impurity_annihilation_matrix(0, p.n_boson_levels);
  const int full = static_cast<int>(h.rows());
  KrylovChain part = reference_lanczos(h, cu.adjoint() * gs.vector, full);
  part.e0 = gs.energy;
  part.kind = ChainKind::Particle;
  KrylovChain hole = reference_lanczos(h, cu * gs.vector, full);
  hole.e0 = gs.energy;
  hole.kind = ChainKind::Hole;
  Spectrum chain = combine(poles_weights(part), poles_weights(hole));
  chain.prune(1e-10);
  chain.sort();
  Spectrum lehmann = lehmann_greens(p);
  lehmann.sort();
  const double dt = seconds_since(t0);
  double dev = 0.0;
  bool same = chain.poles.size() == lehmann.poles.size();
  for (std::size_t k = 0; same && k < chain.poles.size(); ++k) {
    dev = std::max({dev, std::abs(chain.poles[k].omega - lehmann.poles[k].omega),
                    std::abs(chain.poles[k].weight - lehmann.poles[k].weight)});
  }
  c.require(same && dev <= 1e-6, fmt::format("{} poles, max deviation {:.2e}", lehmann.poles.size(), dev));
  c.require(std::abs(lehmann.total_weight() - 1.0) <= 1e-10,
            fmt::format("sum rule |sum w - 1| = {:.2e}", std::abs(lehmann.total_weight() - 1.0)));
  c.require(dt < 1.0, fmt::format("runtime {:.3f}s < 1s", dt));
  return c;
}

Check kvqa_fidelity() {
  Check c;
  const ModelParams p = representative();
  const PauliSum h = build_full_pauli_hamiltonian(p);
  const QuantumState gs = find_ground_state(p, LandscapeGrid{}, EvalMode::Exact).state;
  KrylovSearchConfig var;
  var.mode = KrylovMode::VariationalExact;
  KrylovSearchConfig dir;
  const auto t0 = std::chrono::steady_clock::now();
  for (ChainKind kind : {ChainKind::Hole, ChainKind::Particle}) {
    const KrylovResult v = krylov_chain(gs, h, kind, 2, var);
    const KrylovResult d = krylov_chain(gs, h, kind, 2, dir);
    double min_overlap = 1.0, da = 0.0, db = 0.0;
    const bool sizes = v.chain.a.size() == 3 && d.chain.a.size() == 3 && v.chain.b2.size() == 2;
    for (std::size_t n = 0; sizes && n < 3; ++n) {
      min_overlap = std::min(min_overlap, std::abs(overlap(v.states[n], d.states[n])));
      da = std::max(da, std::abs(v.chain.a[n] - d.chain.a[n]));
      if (n < 2) db = std::max(db, std::abs(v.chain.b2[n] - d.chain.b2[n]));
    }
    const std::string k = to_string(kind);
    c.require(sizes && v.steps.size() == 3 && v.steps[0].surface.rows() == 64,
              k + ": depth 2 with 64x64 scans");
    c.require(min_overlap >= 0.99, fmt::format("{}: min |<var|direct>| = {:.6f}", k, min_overlap));
    c.require(da <= 5e-2 && db <= 5e-2, fmt::format("{}: max |da| = {:.2e}, max |db2| = {:.2e}", k, da, db));
    const Spectrum sv = assemble_particle_hole(poles_weights(v.chain));
    const Spectrum sd = assemble_particle_hole(poles_weights(d.chain));
    double dw = 0.0;
    const bool count = sv.poles.size() == 6 && sd.poles.size() == 6;
    for (std::size_t i = 0; count && i < 6; ++i)
      dw = std::max(dw, std::abs(sv.poles[i].omega - sd.poles[i].omega));
    c.require(count && dw <= 0.1, fmt::format("{}: 3 poles per side, max position shift {:.2e}", k, dw));
  }
  const double dt = seconds_since(t0);
  c.require(dt < 120.0, fmt::format("runtime {:.1f}s < 120s", dt));
  return c;
}

Check short_time_estimator() {
  Check c;
  const ModelParams p = representative();
  const PauliSum h = build_full_pauli_hamiltonian(p);
  const QuantumState gs = QuantumState::normalized(ground_state(diagonalize(to_matrix(h))).vector);
  const Chi0 x0 = chi0(gs, ChainKind::Hole);
  const LanczosRun run = reference_lanczos_with_basis(to_matrix(h), x0.state.amplitudes(), 1);
  const double b1 = std::sqrt(run.chain.b2[0]);
  const QuantumState v0(run.basis[0]), v1(run.basis[1]);
  ShortTimeConfig exact{10, 0.01, 0.3, false, {}};
  ShortTimeConfig trotter{10, 0.01, 0.3, true, {}};
  const double ee = short_time_matrix_element(v1, v0, h, exact);
  const double et = short_time_matrix_element(v1, v0, h, trotter);
  c.require(std::abs(ee - b1) <= 0.05 * b1, fmt::format("exact evolution {:.5f} vs ED {:.5f} ({:.2f}%)", ee,
                                                        b1, 100 * std::abs(ee - b1) / b1));
  c.require(std::abs(et - b1) <= 0.10 * b1,
            fmt::format("single Trotter step {:.5f} ({:.2f}%)", et, 100 * std::abs(et - b1) / b1));
  return c;
}

Check trotter_convergence() {
  Check c;
  ModelParams base;
  base.V = 1.0;
  const ModelParams p = resolve_mu(base, RunConfig{}.mu_convention);
  const TimeGrid grid{10.0, 200};
  const auto t0 = std::chrono::steady_clock::now();
  const auto exact = greens_time(p, grid);
  auto err = [&](int nt) {
    return max_deviation(greens_time(p, grid, {TimeBackend::Trotter, nt, {}, 0}), exact);
  };
  const double e1 = err(1), e4 = err(4), e10 = err(10);
  const double dt = seconds_since(t0);
  c.require(e10 <= 0.1, fmt::format("error(N_T=10) = {:.4f} <= 0.1", e10));
  c.require(e1 > e4 && e4 > e10, fmt::format("error(1) = {:.4f} > error(4) = {:.4f} > error(10)", e1, e4));
  c.require(dt < 60.0, fmt::format("runtime {:.2f}s < 60s", dt));
  return c;
}

Check vha_sanity() {
  Check c;
  {
    PauliSum h(2);
    h.add(0.8, "XY");
    const VhaAnsatz ansatz{h, {}, 1};
    const Eigen::VectorXcd psi0 = init_basis(2, "01").amplitudes();
    const TimeGrid grid{2.0, 20};
    const VhaTrajectory tr = vha_integrate(ansatz, h, psi0, grid);
    const ExactPropagator u(h);
    double dev = 0.0;
    for (int i = 0; i <= grid.n_steps; ++i) {
      const Eigen::VectorXcd psi = ansatz.state(tr.thetas.row(i).transpose(), psi0);
      dev = std::max(dev, (psi - u.evolve(psi0, grid.t(i))).norm());
    }
    c.require(dev <= 1e-6, fmt::format("single-term flow state error {:.2e}", dev));
  }
  const ModelParams p = representative();
  const TimeProblem tp = make_time_problem(p);
  const Eigen::VectorXcd psi0 = tp.phi_plus.normalized();
  {
    const VhaAnsatz ansatz{tp.h, {}, 1};
    const VhaTrajectory tr = vha_integrate(ansatz, tp.h, psi0, TimeGrid{0.05, 1});
    const Eigen::VectorXcd psi = ansatz.state(tr.thetas.row(1).transpose(), psi0);
    const double f = std::norm(psi.dot(ExactPropagator(tp.h).evolve(psi0, 0.05)));
    c.require(f >= 1.0 - 1e-4, fmt::format("fidelity at t=0.05 is 1 - {:.2e}", 1.0 - f));
  }
  TermOrdering reversed(tp.h.size());
  for (std::size_t k = 0; k < tp.h.size(); ++k) reversed[k] = tp.h.size() - 1 - k;
  const TimeGrid grid;
  const auto exact = greens_time(p, grid);
  const VhaResult a = vha_evolve(p, grid, 1);
  const VhaResult b = vha_evolve(p, grid, 1, reversed);
  const double diff = max_deviation(a.img, b.img);
  c.require(diff > 1e-3,
            fmt::format("ordering changes Im G(t<=10) by up to {:.4f} (deviation from exact {:.4f} "
                        "default, {:.4f} reversed)",
                        diff, max_deviation(a.img, exact), max_deviation(b.img, exact)));
  return c;
}

Check sampling_statistics() {
  Check c;
  const ModelParams p = representative();
  const PauliSum hd = build_pauli_hamiltonian(p);
  const QuantumState s = find_ground_state(p, LandscapeGrid{}, EvalMode::Exact).state;
  std::vector<double> few, many;
  for (std::uint64_t r = 0; r < 100; ++r) {
    few.push_back(sample_expectation(s, hd, {2000, 0.0, 1}, r));
    many.push_back(sample_expectation(s, hd, {32000, 0.0, 1}, r));
  }
  const double ratio = sample_std(few) / sample_std(many);
  c.require(in_range(ratio, 2.7, 5.4), fmt::format("std(2000) / std(32000) = {:.3f}", ratio));
  const PauliSum h = build_full_pauli_hamiltonian(p);
  KrylovSearchConfig cfg;
  cfg.mode = KrylovMode::VariationalSampled;
  std::string hit;
  for (std::uint64_t seed = 0; seed < 8 && hit.empty(); ++seed) {
    const KrylovResult r = krylov_chain(s, h, ChainKind::Hole, 4, cfg, NoiseSpec{32000, 0.0, seed});
    if (r.termination == Termination::NegativeB2 && !r.diagnostics.empty()) {
      hit = fmt::format("seed {}: {}", seed, r.diagnostics.front());
    }
  }
  c.require(!hit.empty(), "negative-b2 stop at depth 4" + (hit.empty() ? std::string() : " (" + hit + ")"));
  return c;
}

Check algebra_foundations() {
  Check c;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> op(0, 3);
  auto random_string = [&](std::size_t n) {
    PauliString s(n);
    for (std::size_t q = 0; q < n; ++q) s.set(q, static_cast<PauliOp>(op(rng)));
    return s;
  };
  double hom = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 5);
    const PauliString a = random_string(n), b = random_string(n);
    const auto r = multiply(a, b);
    hom = std::max(hom, (r.phase.value() * to_matrix(r.product) - to_matrix(a) * to_matrix(b)).norm());
  }
  c.require(hom == 0.0, fmt::format("homomorphism on 200 pairs, max error {:.1e}", hom));
  double jw = 0.0;
  for (std::size_t i = 0; i < kFermionModes; ++i) {
    for (std::size_t j = 0; j < kFermionModes; ++j) {
      const Eigen::MatrixXcd ci = to_matrix(jw_annihilation(i, kFermionModes));
      const Eigen::MatrixXcd cj = to_matrix(jw_creation(j, kFermionModes));
      const Eigen::MatrixXcd expect = (i == j ? 1.0 : 0.0) * Eigen::MatrixXcd::Identity(ci.rows(), ci.cols());
      jw = std::max(jw, (ci * cj + cj * ci - expect).norm());
    }
  }
  c.require(jw <= 1e-12, fmt::format("JW anticommutators, max error {:.1e}", jw));
  std::normal_distribution<double> g;
  double pe = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 5);
    const PauliString ps = random_string(n);
    const double angle = g(rng);
    Eigen::VectorXcd psi(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(g(rng), g(rng));
    psi.normalize();
    PauliSum gen(n);
    gen.add(angle, ps);
    const Eigen::VectorXcd dense = ExactPropagator(to_matrix(gen)).evolve(psi, 1.0);
    Eigen::VectorXcd fast = psi;
    apply_pauli_exp(ps, angle, fast);
    pe = std::max(pe, (dense - fast).norm());
  }
  c.require(pe <= 1e-9, fmt::format("PauliExp vs dense exponential, max error {:.1e}", pe));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"exact ground energy", exact_ground_energy},
      {"VQE landscape", vqe_landscape},
      {"exact spectrum anchors", exact_spectrum_anchors},
      {"DMFT fixed point", dmft_fixed_point},
      {"Lanczos/Lehmann equivalence", lanczos_lehmann},
      {"KVQA variational fidelity", kvqa_fidelity},
      {"short-time estimator", short_time_estimator},
      {"Trotter convergence", trotter_convergence},
      {"VHA sanity", vha_sanity},
      {"sampling statistics", sampling_statistics},
      {"algebra and engine foundations", algebra_foundations},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.require(false, fmt::format("threw: {}", e.what()));
    }
    if (!c.pass) ++failed;
    std::string detail;
    for (const auto& n : c.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("criterion {:2}: {} {} [{}]\n", i + 1, c.pass ? "PASS" : "FAIL", criteria[i].first, detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
             criteria.size());
  return failed == 0 ? 0 : 1;
}
