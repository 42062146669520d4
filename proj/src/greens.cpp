#include "hhdmft/greens.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hhdmft/errors.hpp"

namespace hhdmft {

double Spectrum::total_weight() const {
  double w = 0.0;
  for (const auto& p : poles) w += p.weight;
  return w;
}

void Spectrum::sort() {
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.omega < b.omega; });
}

void Spectrum::merge(double tol) {
  sort();
  std::vector<Pole> out;
  for (const auto& p : poles) {
    if (!out.empty() && p.omega - out.back().omega <= tol) {
      Pole& q = out.back();
      const double w = q.weight + p.weight;
      if (w > 0.0) q.omega = (q.omega * q.weight + p.omega * p.weight) / w;
      q.weight = w;
    } else {
      out.push_back(p);
    }
  }
  poles = std::move(out);
}

void Spectrum::prune(double threshold) {
  std::erase_if(poles, [threshold](const Pole& p) { return p.weight <= threshold; });
}

Spectrum combine(const Spectrum& a, const Spectrum& b) {
  Spectrum s = a;
  s.poles.insert(s.poles.end(), b.poles.begin(), b.poles.end());
  s.sort();
  return s;
}

std::string to_string(ChainKind k) { return k == ChainKind::Particle ? "particle" : "hole"; }

void FrequencyGrid::validate() const {
  if (!(omega_min < omega_max)) throw InvalidArgument("omega_min must be below omega_max");
  if (n_points < 2) throw InvalidArgument("frequency grid needs at least 2 points");
  if (!(delta > 0.0)) throw InvalidArgument("broadening delta must be positive");
}

double FrequencyGrid::omega(int i) const {
  return omega_min + (omega_max - omega_min) * static_cast<double>(i) / (n_points - 1);
}

cplx continued_fraction(cplx z, const KrylovChain& chain) {
  if (chain.a.empty()) throw InvalidArgument("empty Krylov chain");
  if (chain.b2.size() + 1 != chain.a.size()) throw InvalidArgument("inconsistent chain lengths");
  cplx tail = 0.0;
  for (std::size_t k = chain.a.size(); k-- > 0;) {
    const cplx denom = z - chain.a[k] - tail;
    if (denom == 0.0) throw PoleHitError(fmt::format("continued fraction pole at z = {}", z.real()));
    tail = (k > 0 ? chain.b2[k - 1] : chain.prefactor) / denom;
  }
  if (!std::isfinite(tail.real()) || !std::isfinite(tail.imag())) {
    throw PoleHitError("continued fraction overflow");
  }
  return tail;
}

std::vector<Pole> tridiagonal_poles(const KrylovChain& chain) {
  if (chain.a.empty()) throw InvalidArgument("empty Krylov chain");
  const auto n = static_cast<Eigen::Index>(chain.a.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) t(i, i) = chain.a[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double b = std::sqrt(std::max(0.0, chain.b2[static_cast<std::size_t>(i)]));
    t(i, i + 1) = b;
    t(i + 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  std::vector<Pole> out;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.push_back({es.eigenvalues()(k), chain.prefactor * es.eigenvectors()(0, k) * es.eigenvectors()(0, k)});
  }
  return out;
}

Spectrum poles_weights(const KrylovChain& chain, double merge_tol) {
  Spectrum s;
  for (const auto& p : tridiagonal_poles(chain)) {
    const double omega = chain.kind == ChainKind::Particle ? p.omega - chain.e0 : chain.e0 - p.omega;
    s.poles.push_back({omega, p.weight});
  }
  s.merge(merge_tol);
  return s;
}

cplx chain_greens(const KrylovChain& chain, cplx z) {
  if (chain.kind == ChainKind::Particle) return continued_fraction(z + chain.e0, chain);
  return -continued_fraction(chain.e0 - z, chain);
}

Spectrum assemble_particle_hole(const Spectrum& particle) {
  Spectrum s = particle;
  for (const auto& p : particle.poles) s.poles.push_back({-p.omega, p.weight});
  s.sort();
  return s;
}

cplx greens(const Spectrum& s, cplx z) {
  cplx g = 0.0;
  for (const auto& p : s.poles) g += p.weight / (z - p.omega);
  return g;
}

SpectralCurve spectral_function(const Spectrum& s, const FrequencyGrid& g) {
  g.validate();
  SpectralCurve c;
  for (int i = 0; i < g.n_points; ++i) {
    const double w = g.omega(i);
    const cplx gf = greens(s, cplx(w, g.delta));
    c.omega.push_back(w);
    c.A.push_back(-gf.imag() / std::numbers::pi);
    c.ReG.push_back(gf.real());
    c.ImG.push_back(gf.imag());
  }
  return c;
}

}  // namespace hhdmft
