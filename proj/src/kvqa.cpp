#include "hhdmft/kvqa.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "hhdmft/errors.hpp"

namespace hhdmft {

std::string to_string(KrylovMode m) {
  switch (m) {
    case KrylovMode::Direct:
      return "direct";
    case KrylovMode::VariationalExact:
      return "variational-exact";
    case KrylovMode::VariationalSampled:
      return "variational-sampled";
  }
  return "?";
}

KrylovMode krylov_mode_from_string(const std::string& s) {
  if (s == "direct") return KrylovMode::Direct;
  if (s == "variational-exact") return KrylovMode::VariationalExact;
  if (s == "variational-sampled") return KrylovMode::VariationalSampled;
  throw InvalidArgument(fmt::format("unknown Krylov mode '{}'", s));
}

std::string to_string(GroundStateSource g) { return g == GroundStateSource::Vqe ? "vqe" : "ed"; }

GroundStateSource ground_state_source_from_string(const std::string& s) {
  if (s == "vqe") return GroundStateSource::Vqe;
  if (s == "ed") return GroundStateSource::Ed;
  throw InvalidArgument(fmt::format("unknown ground state source '{}'", s));
}

std::string to_string(SpectrumSide s) {
  switch (s) {
    case SpectrumSide::Hole:
      return "hole";
    case SpectrumSide::Particle:
      return "particle";
    case SpectrumSide::Both:
      return "both";
  }
  return "?";
}

SpectrumSide spectrum_side_from_string(const std::string& s) {
  if (s == "hole") return SpectrumSide::Hole;
  if (s == "particle") return SpectrumSide::Particle;
  if (s == "both") return SpectrumSide::Both;
  throw InvalidArgument(fmt::format("unknown spectrum side '{}'", s));
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::DepthReached:
      return "depth-reached";
    case Termination::Floor:
      return "b2-floor";
    case Termination::NegativeB2:
      return "negative-b2";
  }
  return "?";
}

void ShortTimeConfig::validate() const {
  if (t_points < 2) throw InvalidArgument("t_points must be at least 2");
  if (!(t_min > 0.0) || !(t_max > t_min)) throw InvalidArgument("t_range must satisfy 0 < t_min < t_max");
}

double KrylovSearchConfig::effective_b2_floor() const {
  if (b2_floor) return *b2_floor;
  return mode == KrylovMode::Direct ? 1e-10 : 1e-3;
}

void KrylovSearchConfig::validate() const {
  grid.validate();
  short_time.validate();
  if (!(effective_b2_floor() >= 0.0)) throw InvalidArgument("b2_floor must be non-negative");
}

Chi0 chi0(const QuantumState& gs, ChainKind kind) {
  const PauliSum op =
      kind == ChainKind::Hole ? jw_annihilation(0, gs.num_qubits()) : jw_creation(0, gs.num_qubits());
  const Eigen::VectorXcd v = apply_sum(op, gs.amplitudes());
  const double n2 = v.squaredNorm();
  if (n2 < 1e-14) {
    throw EmptySectorError(fmt::format("{} excitation of the ground state vanishes", to_string(kind)));
  }
  return {QuantumState::normalized(v), n2};
}

Epsilons cost_epsilons(const QuantumState& candidate, const QuantumState& prev, const QuantumState* prev2,
                       const PauliSum& h, double bn) {
  if (!(bn > 0.0)) throw InvalidArgument("b_n must be positive");
  Epsilons e;
  const double m = std::abs(candidate.amplitudes().dot(apply_sum(h, prev.amplitudes())));
  e.e0 = std::pow(m / bn - 1.0, 2);
  e.e1 = std::norm(overlap(candidate, prev));
  e.e2 = prev2 ? std::norm(overlap(candidate, *prev2)) : 0.0;
  return e;
}

namespace {

// Intercept of the least-squares line through (t_i, f_i / t_i).
double extrapolate(const std::vector<double>& t, const std::vector<double>& f) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double y = f[i] / t[i];
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return (sy - slope * st) / n;
}

std::vector<double> time_points(const ShortTimeConfig& cfg) {
  cfg.validate();
  std::vector<double> t;
  for (int i = 0; i < cfg.t_points; ++i) {
    t.push_back(cfg.t_min + (cfg.t_max - cfg.t_min) * i / (cfg.t_points - 1));
  }
  return t;
}

Eigen::VectorXcd short_time_evolve(const Eigen::VectorXcd& b, const PauliSum& h, double t,
                                   const ShortTimeConfig& cfg, const ExactPropagator* prop) {
  if (cfg.trotter) return trotter_evolve(b, h, t, 1, cfg.ordering);
  return prop->evolve(b, t);
}

}  // namespace

double short_time_matrix_element(const QuantumState& a, const QuantumState& b, const PauliSum& h,
                                 const ShortTimeConfig& cfg) {
  const auto t = time_points(cfg);
  std::optional<ExactPropagator> prop;
  if (!cfg.trotter) prop.emplace(h);
  std::vector<double> f;
  for (double ti : t) {
    f.push_back(
        std::abs(a.amplitudes().dot(short_time_evolve(b.amplitudes(), h, ti, cfg, prop ? &*prop : nullptr))));
  }
  return extrapolate(t, f);
}

double short_time_matrix_element(const QuantumState& a, const QuantumState& b, const PauliSum& h,
                                 const ShortTimeConfig& cfg, const NoiseSpec& noise, std::uint64_t stream) {
  const auto t = time_points(cfg);
  std::optional<ExactPropagator> prop;
  if (!cfg.trotter) prop.emplace(h);
  std::vector<double> f;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const QuantumState evolved =
        QuantumState::normalized(short_time_evolve(b.amplitudes(), h, t[i], cfg, prop ? &*prop : nullptr));
    f.push_back(std::sqrt(sample_overlap(a, evolved, noise, mix_seed(stream, i))));
  }
  return extrapolate(t, f);
}

std::vector<int> sector_indices(ChainKind kind) {
  const unsigned f1 = kind == ChainKind::Hole ? 0b0100U : 0b1110U;
  const unsigned f2 = kind == ChainKind::Hole ? 0b0001U : 0b1011U;
  return {static_cast<int>(f1 << 1), static_cast<int>((f1 << 1) | 1U), static_cast<int>(f2 << 1),
          static_cast<int>((f2 << 1) | 1U)};
}

SectorFamily SectorFamily::product(ChainKind kind) {
  SectorFamily f;
  f.product_ = true;
  for (int idx : sector_indices(kind)) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(32);
    e(idx) = 1.0;
    f.basis_.push_back(e);
  }
  return f;
}

SectorFamily SectorFamily::complement(ChainKind kind, const QuantumState& prev) {
  const auto idx = sector_indices(kind);
  Eigen::MatrixXcd p(4, 1);
  for (int k = 0; k < 4; ++k) p(k, 0) = prev[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
  const double leak = std::abs(p.col(0).squaredNorm() - 1.0);
  if (leak > 1e-8) throw InternalConsistencyError("Krylov state left its excitation sector");
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(p).householderQ();
  SectorFamily f;
  f.product_ = false;
  for (int c = 1; c < 4; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(32);
    for (int k = 0; k < 4; ++k) e(idx[static_cast<std::size_t>(k)]) = q(k, c);
    f.basis_.push_back(e);
  }
  return f;
}

QuantumState SectorFamily::state(const AnsatzAngles& a) const {
  const double ca = std::cos(a.theta0), sa = std::sin(a.theta0);
  const double cb = std::cos(a.theta1), sb = std::sin(a.theta1);
  Eigen::VectorXcd v;
  if (product_) {
    v = ca * cb * basis_[0] + ca * sb * basis_[1] + sa * cb * basis_[2] + sa * sb * basis_[3];
  } else {
    v = ca * basis_[0] + sa * cb * basis_[1] + sa * sb * basis_[2];
  }
  return QuantumState::normalized(std::move(v));
}

namespace {

enum class Purpose : std::uint64_t { Energy = 1, Square = 2, Scan = 3, Reference = 4 };

std::uint64_t stream_key(ChainKind kind, int n, Purpose p, std::uint64_t node = 0) {
  std::uint64_t k = mix_seed(kind == ChainKind::Hole ? 11 : 13, static_cast<std::uint64_t>(n));
  k = mix_seed(k, static_cast<std::uint64_t>(p));
  return mix_seed(k, node);
}

struct Scan {
  AnsatzAngles best;
  double best_cost = 0.0;
  std::optional<AnsatzAngles> alternate;
  double alternate_cost = 0.0;
  Eigen::MatrixXd surface;
};

template <class Cost>
Scan scan_surface(const SectorFamily& fam, const LandscapeGrid& g, Cost&& cost) {
  Scan s;
  const int n0 = g.theta0_points, n1 = g.theta1_points;
  s.surface.resize(n0, n1);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      s.surface(i, j) = cost(AnsatzAngles{g.theta0(i), g.theta1(j)},
                             static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n1) + j);
    }
  }
  // Local minima on the periodic grid, ordered by cost.
  std::vector<std::pair<double, AnsatzAngles>> minima;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double c = s.surface(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && s.surface((i + di + n0) % n0, (j + dj + n1) % n1) < c) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) minima.push_back({c, {g.theta0(i), g.theta1(j)}});
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  s.best = minima.front().second;
  s.best_cost = minima.front().first;
  const QuantumState best_state = fam.state(s.best);
  for (std::size_t k = 1; k < minima.size(); ++k) {
    if (std::abs(overlap(best_state, fam.state(minima[k].second))) < 0.99) {
      s.alternate = minima[k].second;
      s.alternate_cost = minima[k].first;
      break;
    }
  }
  return s;
}

template <class Cost>
AnsatzAngles refine(AnsatzAngles a, double f0, double h0, double h1, Cost&& cost) {
  for (int it = 0; it < 60 && (h0 > 1e-10 || h1 > 1e-10); ++it) {
    const double fm0 = cost({a.theta0 - h0, a.theta1}), fp0 = cost({a.theta0 + h0, a.theta1});
    const double fm1 = cost({a.theta0, a.theta1 - h1}), fp1 = cost({a.theta0, a.theta1 + h1});
    auto step = [](double fm, double f, double fp, double h) {
      const double curv = fm - 2.0 * f + fp;
      if (!(curv > 0.0)) return fm < fp ? -h : (fp < fm ? h : 0.0);
      return std::clamp(0.5 * h * (fm - fp) / curv, -h, h);
    };
    const AnsatzAngles trial{a.theta0 + step(fm0, f0, fp0, h0), a.theta1 + step(fm1, f0, fp1, h1)};
    const double ft = cost(trial);
    if (ft <= f0) {
      a = trial;
      f0 = ft;
    }
    h0 *= 0.5;
    h1 *= 0.5;
  }
  return a;
}

// Least-squares residuals of a step cost as an Eigen functor over (theta0, theta1).
template <class Residuals>
struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  Residuals residuals;
  int n_values;

  int inputs() const { return 2; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    f = residuals(AnsatzAngles{x(0), x(1)});
    return 0;
  }
};

template <class Residuals>
AnsatzAngles polish(const AnsatzAngles& start, Residuals&& residuals, int n_values) {
  using F = ResidualFunctor<std::decay_t<Residuals>>;
  Eigen::NumericalDiff<F, Eigen::Central> functor(F{residuals, n_values});
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<F, Eigen::Central>> lm(functor);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  Eigen::VectorXd x(2);
  x << start.theta0, start.theta1;
  lm.minimize(x);
  return {x(0), x(1)};
}

}  // namespace

KrylovResult krylov_chain(const QuantumState& gs, const PauliSum& h, ChainKind kind, int depth,
                          const KrylovSearchConfig& cfg, const std::optional<NoiseSpec>& noise) {
  cfg.validate();
  if (depth < 0) throw InvalidArgument("depth must be non-negative");
  if (!h.is_hermitian()) throw InvalidArgument("Krylov chain requires a Hermitian sum");
  const bool sampled = cfg.mode == KrylovMode::VariationalSampled;
  const bool variational = cfg.mode != KrylovMode::Direct;
  if (sampled && !noise) throw InvalidArgument("sampled mode requires a noise spec");
  if (variational && gs.num_qubits() != kQubits) {
    throw UnsupportedConfiguration("variational Krylov search is defined on the five-qubit register");
  }
  const double floor = cfg.effective_b2_floor();
  const PauliSum h2 = sum_product(h, h);

  auto energy = [&](const QuantumState& s, int n, Purpose p) {
    const PauliSum& op = p == Purpose::Square ? h2 : h;
    return sampled ? sample_expectation(s, op, *noise, stream_key(kind, n, p)) : expectation(s, op);
  };

  KrylovResult r;
  r.chain.kind = kind;
  r.chain.e0 =
      sampled ? sample_expectation(gs, h, *noise, stream_key(kind, -1, Purpose::Energy)) : expectation(gs, h);
  const Chi0 c0 = chi0(gs, kind);
  r.chain.prefactor = c0.norm2;
  const double h0 = (cfg.grid.theta0_max - cfg.grid.theta0_min) / cfg.grid.theta0_points;
  const double h1 = (cfg.grid.theta1_max - cfg.grid.theta1_min) / cfg.grid.theta1_points;

  if (!variational) {
    r.states.push_back(c0.state);
  } else {
    const SectorFamily fam = SectorFamily::product(kind);
    auto cost = [&](const AnsatzAngles& a, std::uint64_t node) {
      const QuantumState s = fam.state(a);
      const double ov = sampled
                            ? sample_overlap(c0.state, s, *noise, stream_key(kind, 0, Purpose::Scan, node))
                            : std::norm(overlap(c0.state, s));
      return 1.0 - ov;
    };
    Scan sc = scan_surface(fam, cfg.grid, cost);
    AnsatzAngles best = sc.best;
    double best_cost = sc.best_cost;
    if (cfg.refine && !sampled) {
      best = refine(best, best_cost, h0, h1, [&](const AnsatzAngles& a) { return cost(a, 0); });
      best_cost = cost(best, 0);
    }
    r.states.push_back(fam.state(best));
    KrylovStep st;
    st.n = 0;
    st.angles = best.canonical();
    st.cost = best_cost;
    st.alternate = sc.alternate;
    st.alternate_cost = sc.alternate_cost;
    st.surface = std::move(sc.surface);
    r.steps.push_back(std::move(st));
  }

  double b2_prev = 0.0;
  for (int n = 0;; ++n) {
    const QuantumState& cur = r.states.back();
    const double a = energy(cur, n, Purpose::Energy);
    r.chain.a.push_back(a);
    if (n == depth) {
      r.termination = Termination::DepthReached;
      break;
    }
    const double b2 = energy(cur, n, Purpose::Square) - a * a - b2_prev;
    if (b2 < floor) {
      if (cfg.mode == KrylovMode::Direct && b2 < -floor) {
        throw InternalConsistencyError(fmt::format("b_{}^2 = {:.6g} is negative", n + 1, b2));
      }
      if (variational && b2 < 0.0) {
        r.termination = Termination::NegativeB2;
        r.diagnostics.push_back(fmt::format("{} chain: b_{}^2 = {:.6g} < 0, stopping at depth {}",
                                            to_string(kind), n + 1, b2, n));
      } else {
        r.termination = Termination::Floor;
        r.diagnostics.push_back(
            fmt::format("{} chain: b_{}^2 = {:.6g} below floor {:.3g}, stopping at depth {}", to_string(kind),
                        n + 1, b2, floor, n));
      }
      break;
    }
    const double bn = std::sqrt(b2);
    r.chain.b2.push_back(b2);

    if (!variational) {
      Eigen::VectorXcd w = apply_sum(h, cur.amplitudes()) - a * cur.amplitudes();
      if (n > 0) w -= std::sqrt(b2_prev) * r.states[r.states.size() - 2].amplitudes();
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& s : r.states) w -= s.amplitudes().dot(w) * s.amplitudes();
      }
      r.states.push_back(QuantumState::normalized(w));
    } else {
      const SectorFamily fam = SectorFamily::complement(kind, cur);
      const QuantumState* prev2 = r.states.size() >= 2 ? &r.states[r.states.size() - 2] : nullptr;
      const Eigen::VectorXcd hprev = apply_sum(h, cur.amplitudes());
      auto cost = [&](const AnsatzAngles& ang, std::uint64_t node) {
        const QuantumState s = fam.state(ang);
        if (!sampled) {
          Epsilons e;
          e.e0 = std::pow(std::abs(s.amplitudes().dot(hprev)) / bn - 1.0, 2);
          e.e1 = std::norm(overlap(s, cur));
          e.e2 = prev2 ? std::norm(overlap(s, *prev2)) : 0.0;
          return e.sum();
        }
        const std::uint64_t key = stream_key(kind, n + 1, Purpose::Scan, node);
        const double m = short_time_matrix_element(s, cur, h, cfg.short_time, *noise, mix_seed(key, 0));
        double e = std::pow(m / bn - 1.0, 2) + sample_overlap(s, cur, *noise, mix_seed(key, 1));
        if (prev2) e += sample_overlap(s, *prev2, *noise, mix_seed(key, 2));
        return e;
      };
      Scan sc = scan_surface(fam, cfg.grid, cost);
      AnsatzAngles best = sc.best;
      double best_cost = sc.best_cost;
      if (cfg.refine && !sampled) {
        auto residuals = [&](const AnsatzAngles& ang) {
          const QuantumState s = fam.state(ang);
          const cplx o1 = overlap(s, cur);
          const cplx o2 = prev2 ? overlap(s, *prev2) : cplx{};
          Eigen::VectorXd f(5);
          f << std::abs(s.amplitudes().dot(hprev)) / bn - 1.0, o1.real(), o1.imag(), o2.real(), o2.imag();
          return f;
        };
        std::vector<AnsatzAngles> starts = {sc.best};
        if (sc.alternate) starts.push_back(*sc.alternate);
        for (const auto& s0 : starts) {
          const AnsatzAngles x = polish(s0, residuals, 5);
          const double c = cost(x, 0);
          if (c < best_cost) {
            best = x;
            best_cost = c;
          }
        }
      }
      const QuantumState next = fam.state(best);
      KrylovStep st;
      st.n = n + 1;
      st.angles = best.canonical();
      st.cost = best_cost;
      st.eps = cost_epsilons(next, cur, prev2, h, bn);
      st.alternate = sc.alternate;
      st.alternate_cost = sc.alternate_cost;
      st.surface = std::move(sc.surface);
      r.steps.push_back(std::move(st));
      r.states.push_back(next);
    }
    b2_prev = b2;
  }
  return r;
}

}  // namespace hhdmft
