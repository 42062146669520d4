#pragma once

#include <Eigen/Dense>

#include "hhdmft/model.hpp"
#include "hhdmft/spectrum.hpp"

namespace hhdmft {

struct EigenSystem {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
};

EigenSystem diagonalize(const Eigen::MatrixXcd& h);

inline constexpr double kDegeneracyTol = 1e-9;

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd vector;
  int degeneracy = 1;
};

/// Lowest eigenpair; degeneracy counts eigenvalues within kDegeneracyTol.
GroundState ground_state(const EigenSystem& es);

struct LehmannOptions {
  bool average_degenerate = false;
  double weight_threshold = 1e-10;
  double merge_tol = 1e-9;
};

/// Particle poles at E_m - E0 with |<m|c^dagger|GS>|^2 and hole poles at
/// E0 - E_m with |<m|c|GS>|^2 for the impurity orbital of the given spin.
/// A degenerate ground state raises DegeneracyError unless averaging is
/// requested.
Spectrum lehmann_greens(const ModelParams& p, int spin = 0, const LehmannOptions& opt = {});

/// Lanczos with full reorthogonalization. Stops early once b_n^2 < 1e-12.
/// The prefactor is |start|^2; e0 and kind are left for the caller.
KrylovChain reference_lanczos(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& start, int depth);

/// Lanczos vectors alongside the chain, for oracle comparisons.
struct LanczosRun {
  KrylovChain chain;
  std::vector<Eigen::VectorXcd> basis;
};
LanczosRun reference_lanczos_with_basis(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& start, int depth);

/// <n_imp> in the lowest two-electron state.
double impurity_occupation(const ModelParams& p);

/// mu such that the lowest two-electron state has <n_imp> = 1.
double resolve_half_filling_mu(const ModelParams& p);

ModelParams resolve_mu(ModelParams p, MuConvention convention);

}  // namespace hhdmft
