#include "hhdmft/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hhdmft/errors.hpp"

namespace hhdmft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

// Vertex offset of a parabola through (-h, fm), (0, f0), (h, fp), clamped to [-h, h].
double parabola_step(double fm, double f0, double fp, double h) {
  const double curv = fm - 2.0 * f0 + fp;
  if (!(curv > 0.0)) return fm < fp ? -h : (fp < fm ? h : 0.0);
  return std::clamp(0.5 * h * (fm - fp) / curv, -h, h);
}

}  // namespace

AnsatzAngles AnsatzAngles::canonical() const { return {wrap(theta0), wrap(theta1)}; }

void LandscapeGrid::validate() const {
  if (theta0_points < 2 || theta1_points < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  if (!(theta0_max > theta0_min) || !(theta1_max > theta1_min)) {
    throw InvalidArgument("grid ranges must be nonempty");
  }
}

double LandscapeGrid::theta0(int i) const {
  return theta0_min + (theta0_max - theta0_min) * i / theta0_points;
}

double LandscapeGrid::theta1(int j) const {
  return theta1_min + (theta1_max - theta1_min) * j / theta1_points;
}

QuantumState ansatz_state(const AnsatzAngles& a) {
  const double r = 1.0 / std::sqrt(2.0);
  const double s0 = std::sin(a.theta0) * r;
  const double c0 = std::cos(a.theta0) * r;
  const double b0 = std::cos(a.theta1);
  const double b1 = std::sin(a.theta1);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(32);
  auto put = [&](unsigned pattern, double amp) {
    v(static_cast<Eigen::Index>(pattern << 1)) += amp * b0;
    v(static_cast<Eigen::Index>((pattern << 1) | 1U)) += amp * b1;
  };
  put(0b1100, s0);
  put(0b0011, s0);
  put(0b1001, c0);
  put(0b0110, -c0);
  return QuantumState::normalized(std::move(v));
}

Circuit ansatz_circuit(const AnsatzAngles& a) {
  const double pi = std::numbers::pi;
  Circuit c(kQubits);
  c.add(RY{0, 2.0 * a.theta0});
  c.add(RY{1, pi / 2});
  // Relative phases turning (cos|0> + sin|1>)|+> into the required signs.
  c.add(PauliExp{PauliString::parse("ZIIII"), pi / 4});
  c.add(PauliExp{PauliString::parse("IZIII"), 3 * pi / 4});
  c.add(PauliExp{PauliString::parse("ZZIII"), -pi / 4});
  c.add(CNOT{1, 2});
  c.add(CNOT{0, 3});
  c.add(CNOT{1, 3});
  c.add(XGate{3});
  c.add(CNOT{1, 0});
  c.add(CNOT{0, 1});
  c.add(CNOT{1, 0});
  c.add(CNOT{0, 1});
  c.add(XGate{0});
  c.add(RY{4, 2.0 * a.theta1});
  return c;
}

Eigen::MatrixXd energy_landscape(const PauliSum& h, const LandscapeGrid& g, EvalMode mode,
                                 const std::optional<NoiseSpec>& noise) {
  g.validate();
  if (mode == EvalMode::Sampled && !noise) throw InvalidArgument("sampled mode requires a noise spec");
  Eigen::MatrixXd e(g.theta0_points, g.theta1_points);
  for (int i = 0; i < g.theta0_points; ++i) {
    for (int j = 0; j < g.theta1_points; ++j) {
      const QuantumState s = ansatz_state({g.theta0(i), g.theta1(j)});
      e(i, j) = mode == EvalMode::Exact
                    ? expectation(s, h)
                    : sample_expectation(s, h, *noise, static_cast<std::uint64_t>(i) * g.theta1_points + j);
    }
  }
  return e;
}

VqeResult find_ground_state(const ModelParams& p, const LandscapeGrid& g, EvalMode mode,
                            const std::optional<NoiseSpec>& noise) {
  const PauliSum h = build_pauli_hamiltonian(p);
  VqeResult r;
  r.landscape = energy_landscape(h, g, mode, noise);
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  r.grid_energy = r.landscape.minCoeff(&bi, &bj);
  r.grid_angles = {g.theta0(static_cast<int>(bi)), g.theta1(static_cast<int>(bj))};

  const double h0 = (g.theta0_max - g.theta0_min) / g.theta0_points;
  const double h1 = (g.theta1_max - g.theta1_min) / g.theta1_points;
  AnsatzAngles a = r.grid_angles;
  if (mode == EvalMode::Exact) {
    auto energy = [&h](double t0, double t1) { return expectation(ansatz_state({t0, t1}), h); };
    double s0 = h0;
    double s1 = h1;
    double f0 = r.grid_energy;
    for (int it = 0; it < 60 && (s0 > 1e-9 || s1 > 1e-9); ++it) {
      const double d0 =
          parabola_step(energy(a.theta0 - s0, a.theta1), f0, energy(a.theta0 + s0, a.theta1), s0);
      const double d1 =
          parabola_step(energy(a.theta0, a.theta1 - s1), f0, energy(a.theta0, a.theta1 + s1), s1);
      const AnsatzAngles trial{a.theta0 + d0, a.theta1 + d1};
      const double ft = energy(trial.theta0, trial.theta1);
      if (ft <= f0) {
        a = trial;
        f0 = ft;
      }
      s0 *= 0.5;
      s1 *= 0.5;
    }
    r.angles = a.canonical();
    r.energy = f0;
  } else {
    const Eigen::Index n0 = r.landscape.rows();
    const Eigen::Index n1 = r.landscape.cols();
    const auto at = [&](Eigen::Index i, Eigen::Index j) { return r.landscape((i + n0) % n0, (j + n1) % n1); };
    a.theta0 += parabola_step(at(bi - 1, bj), r.grid_energy, at(bi + 1, bj), h0);
    a.theta1 += parabola_step(at(bi, bj - 1), r.grid_energy, at(bi, bj + 1), h1);
    r.angles = a.canonical();
    r.energy = sample_expectation(ansatz_state(r.angles), h, *noise, static_cast<std::uint64_t>(n0 * n1));
  }
  r.state = ansatz_state(r.angles);
  return r;
}

}  // namespace hhdmft
