#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "hhdmft/errors.hpp"
#include "hhdmft/statevector.hpp"

namespace hhdmft {

namespace {

// Rotates qubit q so that a Z measurement reads out the given Pauli.
void rotate_to_z_basis(Eigen::VectorXcd& psi, std::size_t n, std::size_t q, PauliOp op) {
  if (op != PauliOp::X && op != PauliOp::Y) return;
  const std::uint64_t m = std::uint64_t{1} << (n - 1 - q);
  const double r = 1.0 / std::sqrt(2.0);
  const std::uint64_t dim = static_cast<std::uint64_t>(psi.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & m) continue;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(b | m);
    cplx a0 = psi(i0);
    cplx a1 = psi(i1);
    if (op == PauliOp::Y) a1 *= cplx(0.0, -1.0);  // S^dagger
    psi(i0) = r * (a0 + a1);
    psi(i1) = r * (a0 - a1);
  }
}

// Probability that a k-qubit parity is flipped by independent readout flips.
double parity_flip_probability(double f, std::size_t k) {
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * f, static_cast<double>(k)));
}

std::uint64_t draw_binomial(std::uint64_t shots, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(p, 0.0, 1.0));
  return dist(rng);
}

}  // namespace

double sample_expectation(const QuantumState& s, const PauliSum& h, const NoiseSpec& noise,
                          std::uint64_t stream) {
  noise.validate();
  if (!h.is_hermitian(1e-12)) throw InvalidArgument("expectation requires a Hermitian sum");
  if (!h.empty() && h.num_qubits() != s.num_qubits()) {
    throw InvalidArgument("Hamiltonian and state register sizes differ");
  }
  const std::size_t n = s.num_qubits();
  const std::uint64_t stream_seed = mix_seed(noise.seed, stream);
  double total = 0.0;
  for (std::size_t k = 0; k < h.terms().size(); ++k) {
    const auto& term = h.terms()[k];
    const double c = term.coefficient.real();
    if (term.string.is_identity()) {
      total += c;
      continue;
    }
    Eigen::VectorXcd psi = s.amplitudes();
    std::uint64_t support = 0;
    std::size_t weight = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const PauliOp op = term.string.op(q);
      if (op == PauliOp::I) continue;
      rotate_to_z_basis(psi, n, q, op);
      support |= std::uint64_t{1} << (n - 1 - q);
      ++weight;
    }
    double p_even = 0.0;
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
      if ((std::popcount(static_cast<std::uint64_t>(b) & support) & 1) == 0) p_even += std::norm(psi(b));
    }
    const double q = parity_flip_probability(noise.readout_flip, weight);
    const double p_obs = p_even * (1.0 - q) + (1.0 - p_even) * q;
    const std::uint64_t even = draw_binomial(noise.shots, p_obs, mix_seed(stream_seed, k));
    const double estimate = 2.0 * static_cast<double>(even) / static_cast<double>(noise.shots) - 1.0;
    total += c * estimate;
  }
  return total;
}

double sample_overlap(const QuantumState& a, const QuantumState& b, const NoiseSpec& noise,
                      std::uint64_t stream) {
  noise.validate();
  if (a.num_qubits() != b.num_qubits()) throw InvalidArgument("overlap of different registers");
  const Eigen::VectorXcd& av = a.amplitudes();
  // Unitary U = phase * (I - 2 v v^dagger / |v|^2) with U|0> = a.
  const cplx a0 = av(0);
  const cplx phase = std::abs(a0) > 0.0 ? a0 / std::abs(a0) : cplx(1.0, 0.0);
  Eigen::VectorXcd v = -std::conj(phase) * av;
  v(0) += 1.0;
  Eigen::VectorXcd rotated = b.amplitudes();
  const double vv = v.squaredNorm();
  if (vv > 1e-30) rotated -= (2.0 / vv) * v * v.dot(rotated);
  rotated *= std::conj(phase);

  const std::size_t n = a.num_qubits();
  const double f = noise.readout_flip;
  double p_zero = 0.0;
  for (Eigen::Index i = 0; i < rotated.size(); ++i) {
    const int ones = std::popcount(static_cast<std::uint64_t>(i));
    p_zero += std::norm(rotated(i)) * std::pow(f, ones) * std::pow(1.0 - f, static_cast<double>(n) - ones);
  }
  const std::uint64_t zeros = draw_binomial(noise.shots, p_zero, mix_seed(mix_seed(noise.seed, stream), 0));
  return static_cast<double>(zeros) / static_cast<double>(noise.shots);
}

}  // namespace hhdmft
