#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "hhdmft/pauli.hpp"

namespace hhdmft {

class QuantumState {
 public:
  QuantumState() = default;
  /// |0...0> on n qubits.
  explicit QuantumState(std::size_t n);
  /// Throws InvalidArgument unless the length is a power of two and the norm is 1 within 1e-10.
  explicit QuantumState(Eigen::VectorXcd amplitudes);

  /// Rescales a nonzero vector to unit norm.
  static QuantumState normalized(Eigen::VectorXcd amplitudes);

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm() const { return amps_.norm(); }

 private:
  std::size_t n_ = 0;
  Eigen::VectorXcd amps_;
};

QuantumState init_basis(std::size_t n, std::string_view occupation);

/// exp(-i angle Y / 2) on one qubit.
struct RY {
  std::size_t qubit;
  double angle;
};
struct XGate {
  std::size_t qubit;
};
struct CNOT {
  std::size_t control;
  std::size_t target;
};
/// exp(-i angle P).
struct PauliExp {
  PauliString string;
  double angle;
};

using Gate = std::variant<RY, XGate, CNOT, PauliExp>;

class Circuit {
 public:
  explicit Circuit(std::size_t n) : n_(n) {}

  std::size_t num_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  Circuit& add(Gate g);

 private:
  std::size_t n_;
  std::vector<Gate> gates_;
};

Eigen::VectorXcd apply_gate(const Gate& g, std::size_t n, Eigen::VectorXcd psi);
/// In-place exp(-i angle P) psi.
void apply_pauli_exp(const PauliString& p, double angle, Eigen::VectorXcd& psi);

QuantumState apply(const Circuit& c, const QuantumState& s);

double expectation(const QuantumState& s, const PauliSum& h);
cplx overlap(const QuantumState& a, const QuantumState& b);

struct NoiseSpec {
  std::uint64_t shots = 32000;
  double readout_flip = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Shot-sampled <s|h|s>. Each non-identity term is measured in its own
/// rotated basis; identity terms contribute their coefficient exactly.
/// The draw for term k is seeded from (noise.seed, stream, k), so results do
/// not depend on evaluation order.
double sample_expectation(const QuantumState& s, const PauliSum& h, const NoiseSpec& noise,
                          std::uint64_t stream = 0);

/// Shot-sampled |<a|b>|^2: b is rotated by the inverse of a Householder
/// preparation of a and the all-zero outcome frequency is returned.
double sample_overlap(const QuantumState& a, const QuantumState& b, const NoiseSpec& noise,
                      std::uint64_t stream = 0);

/// splitmix64 finalizer, used to derive independent RNG seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace hhdmft
