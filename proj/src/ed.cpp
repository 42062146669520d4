#include "hhdmft/ed.hpp"

#include <fmt/format.h>

#include <bit>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "hhdmft/errors.hpp"

namespace hhdmft {

EigenSystem diagonalize(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw InvalidArgument("matrix is not square");
  if (h.size() > 0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw InternalConsistencyError("eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

GroundState ground_state(const EigenSystem& es) {
  if (es.energies.size() == 0) throw InvalidArgument("empty eigensystem");
  GroundState gs{es.energies(0), es.vectors.col(0), 1};
  while (gs.degeneracy < es.energies.size() && es.energies(gs.degeneracy) - es.energies(0) < kDegeneracyTol) {
    ++gs.degeneracy;
  }
  return gs;
}

Spectrum lehmann_greens(const ModelParams& p, int spin, const LehmannOptions& opt) {
  const EigenSystem es = diagonalize(build_full_hamiltonian(p));
  const GroundState gs = ground_state(es);
  if (gs.degeneracy > 1 && !opt.average_degenerate) {
    throw DegeneracyError(
        fmt::format("ground state is {}-fold degenerate at E0 = {}", gs.degeneracy, gs.energy));
  }
  const Eigen::MatrixXcd c = impurity_annihilation_matrix(spin, p.n_boson_levels);
  const Eigen::MatrixXcd cdag = c.adjoint();
  const Eigen::Index dim = es.energies.size();
  Eigen::VectorXd wp = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd wh = Eigen::VectorXd::Zero(dim);
  for (int g = 0; g < gs.degeneracy; ++g) {
    const Eigen::VectorXcd v = es.vectors.col(g);
    wp += (es.vectors.adjoint() * (cdag * v)).cwiseAbs2();
    wh += (es.vectors.adjoint() * (c * v)).cwiseAbs2();
  }
  wp /= gs.degeneracy;
  wh /= gs.degeneracy;

  Spectrum s;
  for (Eigen::Index m = 0; m < dim; ++m) {
    const double de = es.energies(m) - gs.energy;
    if (wp(m) > opt.weight_threshold) s.poles.push_back({de, wp(m)});
    if (wh(m) > opt.weight_threshold) s.poles.push_back({-de, wh(m)});
  }
  s.merge(opt.merge_tol);
  return s;
}

LanczosRun reference_lanczos_with_basis(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& start, int depth) {
  if (depth < 0) throw InvalidArgument("depth must be non-negative");
  if (start.size() != h.rows()) throw InvalidArgument("start vector dimension mismatch");
  const double norm2 = start.squaredNorm();
  if (!(norm2 > 0.0)) throw InvalidArgument("Lanczos start vector is zero");

  LanczosRun run;
  run.chain.prefactor = norm2;
  run.basis.push_back(start / std::sqrt(norm2));
  for (int n = 0;; ++n) {
    const Eigen::VectorXcd& v = run.basis.back();
    Eigen::VectorXcd w = h * v;
    run.chain.a.push_back(v.dot(w).real());
    if (n == depth) break;
    // Two passes of Gram-Schmidt against every previous vector.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : run.basis) w -= u.dot(w) * u;
    }
    const double b2 = w.squaredNorm();
    if (b2 < 1e-12) break;
    run.chain.b2.push_back(b2);
    run.basis.push_back(w / std::sqrt(b2));
  }
  return run;
}

KrylovChain reference_lanczos(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& start, int depth) {
  return reference_lanczos_with_basis(h, start, depth).chain;
}

double impurity_occupation(const ModelParams& p) {
  const Eigen::MatrixXcd h = build_full_hamiltonian(p);
  const int nb = p.n_boson_levels;
  std::vector<Eigen::Index> sector;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (std::popcount(static_cast<unsigned>(i / nb)) == 2) sector.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(sector.size());
  Eigen::MatrixXcd block(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) block(r, c) = h(sector[r], sector[c]);
  }
  const Eigen::VectorXcd g = diagonalize(block).vectors.col(0);
  double n = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto pattern = static_cast<unsigned>(sector[r] / nb);
    n += std::norm(g(r)) * static_cast<double>(((pattern >> 3) & 1U) + ((pattern >> 2) & 1U));
  }
  return n;
}

double resolve_half_filling_mu(const ModelParams& p) {
  p.validate();
  // The lowest two-electron energy is concave in mu, so <n_imp> is
  // nondecreasing and the root is bracketed by expanding outward.
  auto f = [p](double mu) {
    ModelParams q = p;
    q.mu = mu;
    return impurity_occupation(q) - 1.0;
  };
  double lo = p.U / 2 - 1.0;
  double hi = p.U / 2 + 1.0;
  double flo = f(lo);
  double fhi = f(hi);
  for (int k = 0; k < 60 && flo > 0.0; ++k) {
    lo -= (hi - lo);
    flo = f(lo);
  }
  for (int k = 0; k < 60 && fhi < 0.0; ++k) {
    hi += (hi - lo);
    fhi = f(hi);
  }
  if (flo > 0.0 || fhi < 0.0) throw InternalConsistencyError("could not bracket half filling");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
  const double mu = 0.5 * (a + b);
  if (std::abs(f(mu)) > 1e-8) {
    throw InternalConsistencyError(fmt::format("half filling not reached, <n_imp> - 1 = {}", f(mu)));
  }
  return mu;
}

ModelParams resolve_mu(ModelParams p, MuConvention convention) {
  switch (convention) {
    case MuConvention::Explicit:
      break;
    case MuConvention::HalfU:
      p.mu = p.U / 2;
      break;
    case MuConvention::HalfFilling:
      p.mu = resolve_half_filling_mu(p);
      break;
  }
  return p;
}

}  // namespace hhdmft
