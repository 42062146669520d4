#include "hhdmft/time_evolution.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hhdmft/ed.hpp"
#include "hhdmft/errors.hpp"

namespace hhdmft {

void TimeGrid::validate() const {
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  if (n_steps < 1) throw InvalidArgument("n_steps must be at least 1");
}

ExactPropagator::ExactPropagator(const Eigen::MatrixXcd& h) {
  const EigenSystem es = diagonalize(h);
  energies_ = es.energies;
  vectors_ = es.vectors;
}

ExactPropagator::ExactPropagator(const PauliSum& h) : ExactPropagator(to_matrix(h)) {
  if (!h.is_hermitian()) throw InvalidArgument("evolution requires a Hermitian sum");
}

Eigen::VectorXcd ExactPropagator::evolve(const Eigen::VectorXcd& psi, double t) const {
  if (psi.size() != energies_.size()) throw InvalidArgument("state dimension mismatch");
  Eigen::VectorXcd c = vectors_.adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -energies_(k) * t));
  return vectors_ * c;
}

QuantumState exact_evolve(const QuantumState& s, const PauliSum& h, double t) {
  return QuantumState::normalized(ExactPropagator(h).evolve(s.amplitudes(), t));
}

void validate_ordering(const TermOrdering& ordering, std::size_t n_terms) {
  if (ordering.empty()) return;
  if (ordering.size() != n_terms) {
    throw InvalidArgument(fmt::format("ordering has {} entries for {} terms", ordering.size(), n_terms));
  }
  std::vector<bool> seen(n_terms, false);
  for (std::size_t k : ordering) {
    if (k >= n_terms || seen[k]) throw InvalidArgument("ordering is not a permutation");
    seen[k] = true;
  }
}

TermOrdering parse_ordering(const std::string& text, std::size_t n_terms) {
  TermOrdering out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(item, &pos);
      if (v < 0 || item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw InvalidArgument(fmt::format("invalid ordering entry '{}'", item));
    }
  }
  validate_ordering(out, n_terms);
  return out;
}

namespace {

std::vector<std::size_t> resolved_order(const TermOrdering& ordering, std::size_t n) {
  validate_ordering(ordering, n);
  if (!ordering.empty()) return ordering;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

Eigen::VectorXcd trotter_evolve(const Eigen::VectorXcd& psi, const PauliSum& h, double t, int n_t,
                                const TermOrdering& ordering) {
  if (n_t < 1) throw InvalidArgument("n_t must be at least 1");
  if (!h.is_hermitian()) throw InvalidArgument("evolution requires a Hermitian sum");
  const auto order = resolved_order(ordering, h.size());
  const double dt = t / n_t;
  Eigen::VectorXcd out = psi;
  for (int step = 0; step < n_t; ++step) {
    for (std::size_t m : order) {
      const auto& term = h.terms()[m];
      apply_pauli_exp(term.string, term.coefficient.real() * dt, out);
    }
  }
  return out;
}

QuantumState trotter_evolve(const QuantumState& s, const PauliSum& h, double t, int n_t,
                            const TermOrdering& ordering) {
  return QuantumState::normalized(trotter_evolve(s.amplitudes(), h, t, n_t, ordering));
}

TimeProblem make_time_problem(const ModelParams& p, int spin) {
  TimeProblem tp;
  tp.h = build_full_pauli_hamiltonian(p);
  const GroundState gs = ground_state(diagonalize(to_matrix(tp.h)));
  if (gs.degeneracy > 1) throw DegeneracyError("degenerate ground state in time evolution");
  tp.e0 = gs.energy;
  const PauliSum c = jw_annihilation(static_cast<std::size_t>(spin), kQubits);
  tp.phi_minus = apply_sum(c, gs.vector);
  tp.phi_plus = apply_sum(jw_creation(static_cast<std::size_t>(spin), kQubits), gs.vector);
  return tp;
}

namespace {

double img_from_amplitudes(double e0, double t, cplx plus, cplx minus) {
  const cplx g =
      cplx(0.0, -1.0) * (std::exp(cplx(0.0, e0 * t)) * plus + std::exp(cplx(0.0, -e0 * t)) * minus);
  return g.imag();
}

}  // namespace

std::vector<double> greens_time(const ModelParams& p, const TimeGrid& g, const GreensTimeOptions& opt) {
  g.validate();
  if (opt.backend == TimeBackend::Vha) {
    return vha_evolve(p, g, opt.n_t, opt.ordering).img;
  }
  const TimeProblem tp = make_time_problem(p, opt.spin);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(g.n_steps) + 1);
  if (opt.backend == TimeBackend::Exact) {
    const ExactPropagator prop(tp.h);
    for (int i = 0; i <= g.n_steps; ++i) {
      const double t = g.t(i);
      const cplx plus = tp.phi_plus.dot(prop.evolve(tp.phi_plus, t));
      const cplx minus = tp.phi_minus.dot(prop.evolve(tp.phi_minus, -t));
      out.push_back(img_from_amplitudes(tp.e0, t, plus, minus));
    }
    return out;
  }
  if (opt.n_t < 1) throw InvalidArgument("n_t must be at least 1");
  const PauliSum neg = tp.h.scaled(-1.0);
  for (int i = 0; i <= g.n_steps; ++i) {
    const double t = g.t(i);
    const int steps = std::max(1, static_cast<int>(std::ceil(opt.n_t * t - 1e-12)));
    const cplx plus = tp.phi_plus.dot(trotter_evolve(tp.phi_plus, tp.h, t, steps, opt.ordering));
    const cplx minus = tp.phi_minus.dot(trotter_evolve(tp.phi_minus, neg, t, steps, opt.ordering));
    out.push_back(img_from_amplitudes(tp.e0, t, plus, minus));
  }
  return out;
}

Eigen::VectorXcd VhaAnsatz::state(const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0) const {
  const auto order = resolved_order(ordering, h.size());
  Eigen::VectorXcd psi = psi0;
  std::size_t k = 0;
  for (int layer = 0; layer < n_layers; ++layer) {
    for (std::size_t m : order) {
      apply_pauli_exp(h.terms()[m].string, -theta(static_cast<Eigen::Index>(k++)), psi);
    }
  }
  return psi;
}

Eigen::MatrixXcd VhaAnsatz::tangents(const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0) const {
  const auto order = resolved_order(ordering, h.size());
  const std::size_t np = num_parameters();
  std::vector<const PauliString*> gates;
  for (int layer = 0; layer < n_layers; ++layer) {
    for (std::size_t m : order) gates.push_back(&h.terms()[m].string);
  }
  Eigen::MatrixXcd t(psi0.size(), static_cast<Eigen::Index>(np));
  Eigen::VectorXcd prefix = psi0;
  for (std::size_t k = 0; k < np; ++k) {
    apply_pauli_exp(*gates[k], -theta(static_cast<Eigen::Index>(k)), prefix);
    Eigen::VectorXcd d = cplx(0.0, 1.0) * apply_pauli(*gates[k], prefix);
    for (std::size_t j = k + 1; j < np; ++j) {
      apply_pauli_exp(*gates[j], -theta(static_cast<Eigen::Index>(j)), d);
    }
    t.col(static_cast<Eigen::Index>(k)) = d;
  }
  return t;
}

Eigen::VectorXd mclachlan_rhs(const VhaAnsatz& ansatz, const PauliSum& generator,
                              const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0,
                              const VhaFlowOptions& opt, double* residual) {
  const Eigen::MatrixXcd tan = ansatz.tangents(theta, psi0);
  const Eigen::VectorXcd psi = ansatz.state(theta, psi0);
  const Eigen::VectorXcd hpsi = apply_sum(generator, psi);
  const Eigen::MatrixXd a = (tan.adjoint() * tan).real();
  const Eigen::VectorXd c = (tan.adjoint() * hpsi).imag();
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd reg = a + opt.regularization * Eigen::MatrixXd::Identity(n, n);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
  Eigen::VectorXd x = ldlt.solve(c);
  double res = (reg * x - c).norm();
  for (int it = 0; it < 5 && res > 0.1 * opt.residual_tol; ++it) {
    x += ldlt.solve(c - reg * x);
    res = (reg * x - c).norm();
  }
  if (residual) *residual = res;
  return x;
}

VhaTrajectory vha_integrate(const VhaAnsatz& ansatz, const PauliSum& generator, const Eigen::VectorXcd& psi0,
                            const TimeGrid& g, const VhaFlowOptions& opt) {
  g.validate();
  if (ansatz.n_layers < 1) throw InvalidArgument("VHA needs at least one layer");
  const int sub = 200;
  const double dt = g.t_max / (static_cast<double>(sub) * g.n_steps);
  const auto np = static_cast<Eigen::Index>(ansatz.num_parameters());

  VhaTrajectory tr;
  tr.ordering = resolved_order(ansatz.ordering, ansatz.h.size());
  tr.n_trotter = ansatz.n_layers;
  tr.thetas.resize(g.n_steps + 1, np);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(np);
  double t = 0.0;
  auto rhs = [&](const Eigen::VectorXd& th, double time) {
    double res = 0.0;
    Eigen::VectorXd v = mclachlan_rhs(ansatz, generator, th, psi0, opt, &res);
    tr.max_residual = std::max(tr.max_residual, res);
    if (!(res <= opt.residual_tol)) {
      throw IllConditionedError(fmt::format("McLachlan system residual {:.3g} at t = {:.6g}", res, time));
    }
    return v;
  };
  tr.times.push_back(0.0);
  tr.thetas.row(0) = theta.transpose();
  for (int i = 1; i <= g.n_steps; ++i) {
    for (int s = 0; s < sub; ++s) {
      const Eigen::VectorXd k1 = rhs(theta, t);
      const Eigen::VectorXd k2 = rhs(theta + 0.5 * dt * k1, t + 0.5 * dt);
      const Eigen::VectorXd k3 = rhs(theta + 0.5 * dt * k2, t + 0.5 * dt);
      const Eigen::VectorXd k4 = rhs(theta + dt * k3, t + dt);
      theta += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
    }
    tr.times.push_back(g.t(i));
    tr.thetas.row(i) = theta.transpose();
  }
  return tr;
}

VhaResult vha_evolve(const ModelParams& p, const TimeGrid& g, int n_t, const TermOrdering& ordering,
                     const VhaFlowOptions& opt) {
  if (n_t < 1) throw InvalidArgument("n_t must be at least 1");
  const TimeProblem tp = make_time_problem(p);
  const VhaAnsatz ansatz{tp.h, ordering, n_t};
  const double np2 = tp.phi_plus.squaredNorm();
  const double nm2 = tp.phi_minus.squaredNorm();
  const Eigen::VectorXcd plus0 = tp.phi_plus / std::sqrt(np2);
  const Eigen::VectorXcd minus0 = tp.phi_minus / std::sqrt(nm2);

  VhaResult r;
  r.forward = vha_integrate(ansatz, tp.h, plus0, g, opt);
  r.backward = vha_integrate(ansatz, tp.h.scaled(-1.0), minus0, g, opt);
  for (int i = 0; i <= g.n_steps; ++i) {
    const double t = g.t(i);
    const cplx plus = np2 * plus0.dot(ansatz.state(r.forward.thetas.row(i).transpose(), plus0));
    const cplx minus = nm2 * minus0.dot(ansatz.state(r.backward.thetas.row(i).transpose(), minus0));
    r.img.push_back(img_from_amplitudes(tp.e0, t, plus, minus));
  }
  return r;
}

}  // namespace hhdmft
