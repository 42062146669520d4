#include "hhdmft/statevector.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>

#include "hhdmft/errors.hpp"

namespace hhdmft {

namespace {

std::size_t qubits_for_dim(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw InvalidArgument(fmt::format("state dimension {} is not a power of two", dim));
  }
  return static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(dim)));
}

std::uint64_t bit_of(std::size_t n, std::size_t q) { return std::uint64_t{1} << (n - 1 - q); }

void check_qubit(std::size_t q, std::size_t n) {
  if (q >= n) throw InvalidArgument(fmt::format("qubit {} outside register of {}", q, n));
}

}  // namespace

QuantumState::QuantumState(std::size_t n) : n_(n), amps_(Eigen::VectorXcd::Zero(Eigen::Index{1} << n)) {
  amps_(0) = 1.0;
}

QuantumState::QuantumState(Eigen::VectorXcd amplitudes)
    : n_(qubits_for_dim(amplitudes.size())), amps_(std::move(amplitudes)) {
  if (std::abs(amps_.norm() - 1.0) > 1e-10) {
    throw InvalidArgument(fmt::format("state norm {} differs from 1", amps_.norm()));
  }
}

QuantumState QuantumState::normalized(Eigen::VectorXcd amplitudes) {
  const double nrm = amplitudes.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  amplitudes /= nrm;
  return QuantumState(std::move(amplitudes));
}

QuantumState init_basis(std::size_t n, std::string_view occupation) {
  if (occupation.size() != n) {
    throw InvalidArgument(fmt::format("pattern '{}' does not have {} bits", occupation, n));
  }
  std::uint64_t index = 0;
  for (char c : occupation) {
    if (c != '0' && c != '1') throw InvalidArgument("occupation pattern must be 0/1");
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(std::move(v));
}

Circuit& Circuit::add(Gate g) {
  std::visit(
      [this](const auto& gate) {
        using T = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<T, RY> || std::is_same_v<T, XGate>) {
          check_qubit(gate.qubit, n_);
        } else if constexpr (std::is_same_v<T, CNOT>) {
          check_qubit(gate.control, n_);
          check_qubit(gate.target, n_);
          if (gate.control == gate.target) throw InvalidArgument("CNOT control equals target");
        } else {
          if (gate.string.size() != n_) throw InvalidArgument("PauliExp string length mismatch");
        }
      },
      g);
  gates_.push_back(std::move(g));
  return *this;
}

void apply_pauli_exp(const PauliString& p, double angle, Eigen::VectorXcd& psi) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Eigen::VectorXcd ppsi = apply_pauli(p, psi);
  psi = c * psi - cplx(0.0, s) * ppsi;
}

Eigen::VectorXcd apply_gate(const Gate& g, std::size_t n, Eigen::VectorXcd psi) {
  const std::uint64_t dim = static_cast<std::uint64_t>(psi.size());
  std::visit(
      [&](const auto& gate) {
        using T = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<T, RY>) {
          const std::uint64_t m = bit_of(n, gate.qubit);
          const double c = std::cos(gate.angle / 2);
          const double s = std::sin(gate.angle / 2);
          for (std::uint64_t b = 0; b < dim; ++b) {
            if (b & m) continue;
            const auto i0 = static_cast<Eigen::Index>(b);
            const auto i1 = static_cast<Eigen::Index>(b | m);
            const cplx a0 = psi(i0);
            const cplx a1 = psi(i1);
            psi(i0) = c * a0 - s * a1;
            psi(i1) = s * a0 + c * a1;
          }
        } else if constexpr (std::is_same_v<T, XGate>) {
          const std::uint64_t m = bit_of(n, gate.qubit);
          for (std::uint64_t b = 0; b < dim; ++b) {
            if (!(b & m)) std::swap(psi(static_cast<Eigen::Index>(b)), psi(static_cast<Eigen::Index>(b | m)));
          }
        } else if constexpr (std::is_same_v<T, CNOT>) {
          const std::uint64_t mc = bit_of(n, gate.control);
          const std::uint64_t mt = bit_of(n, gate.target);
          for (std::uint64_t b = 0; b < dim; ++b) {
            if ((b & mc) && !(b & mt)) {
              std::swap(psi(static_cast<Eigen::Index>(b)), psi(static_cast<Eigen::Index>(b | mt)));
            }
          }
        } else {
          apply_pauli_exp(gate.string, gate.angle, psi);
        }
      },
      g);
  return psi;
}

QuantumState apply(const Circuit& c, const QuantumState& s) {
  if (c.num_qubits() != s.num_qubits()) {
    throw InvalidArgument(fmt::format("circuit has {} qubits, state has {}", c.num_qubits(), s.num_qubits()));
  }
  Eigen::VectorXcd psi = s.amplitudes();
  for (const auto& g : c.gates()) psi = apply_gate(g, c.num_qubits(), std::move(psi));
  return QuantumState::normalized(std::move(psi));
}

double expectation(const QuantumState& s, const PauliSum& h) {
  if (!h.is_hermitian(1e-12)) throw InvalidArgument("expectation requires a Hermitian sum");
  if (!h.empty() && h.num_qubits() != s.num_qubits()) {
    throw InvalidArgument("Hamiltonian and state register sizes differ");
  }
  const cplx e = s.amplitudes().dot(apply_sum(h, s.amplitudes()));
  return e.real();
}

cplx overlap(const QuantumState& a, const QuantumState& b) {
  if (a.num_qubits() != b.num_qubits()) throw InvalidArgument("overlap of different registers");
  return a.amplitudes().dot(b.amplitudes());
}

void NoiseSpec::validate() const {
  if (shots < 1) throw InvalidArgument("shots must be at least 1");
  if (!(readout_flip >= 0.0 && readout_flip <= 0.5)) {
    throw InvalidArgument("readout_flip must lie in [0, 0.5]");
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hhdmft
