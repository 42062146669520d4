#pragma once

#include <Eigen/Dense>
#include <string>

#include "hhdmft/pauli.hpp"

namespace hhdmft {

/// Two-site Hubbard-Holstein impurity: impurity and bath orbitals, both spins,
/// one local boson mode truncated to n_boson_levels occupation states.
struct ModelParams {
  double U = 4.0;
  double V = 0.8;
  double mu = 2.0;
  double omega0 = 5.0;
  double lambda = 1.5;
  int n_boson_levels = 2;

  void validate() const;
};

enum class MuConvention {
  Explicit,     ///< keep ModelParams::mu as given
  HalfFilling,  ///< solve <n_imp> = 1 in the exact ground state
  HalfU,        ///< mu = U/2
};

std::string to_string(MuConvention c);
MuConvention mu_convention_from_string(const std::string& s);

inline constexpr std::size_t kFermionModes = 4;
inline constexpr std::size_t kQubits = 5;

/// Jordan-Wigner image of c_i on n_modes qubits: Z...Z (X + iY)/2 I...I.
PauliSum jw_annihilation(std::size_t i, std::size_t n_modes);
PauliSum jw_creation(std::size_t i, std::size_t n_modes);

/// The five-qubit device Hamiltonian. Single-Z terms and the fermion-boson
/// coupling strings are absent. Requires n_boson_levels == 2.
PauliSum build_pauli_hamiltonian(const ModelParams& p);

/// Complete five-qubit image of the model with one boson qubit, including
/// the ZIIII, IZIII, ZIIIX and IZIIX terms. The first eight terms coincide
/// with build_pauli_hamiltonian. Requires n_boson_levels == 2.
PauliSum build_full_pauli_hamiltonian(const ModelParams& p);

/// Dense matrix in the basis (fermion pattern) x (boson level), dimension
/// 16 * n_boson_levels. Fermion pattern bits are ordered imp-up, imp-down,
/// bath-up, bath-down from the most significant bit.
Eigen::MatrixXcd build_full_hamiltonian(const ModelParams& p);

/// c_imp-up (or down) embedded in the dense fermion x boson space.
Eigen::MatrixXcd impurity_annihilation_matrix(int spin, int n_boson_levels);
/// n_imp-up + n_imp-down in the dense space.
Eigen::MatrixXcd impurity_occupation_matrix(int n_boson_levels);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace hhdmft
