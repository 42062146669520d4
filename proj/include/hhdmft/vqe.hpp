#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hhdmft/model.hpp"
#include "hhdmft/statevector.hpp"

namespace hhdmft {

/// Amplitude angles of the two-parameter ansatz. The RY gates of the
/// preparation circuit rotate by twice these values.
struct AnsatzAngles {
  double theta0 = 0.0;
  double theta1 = 0.0;

  /// Both angles reduced to [0, 2 pi).
  AnsatzAngles canonical() const;
};

/// Nodes lo + i (hi - lo) / points along each axis (upper end excluded, so
/// the default grid tiles the periodic domain).
struct LandscapeGrid {
  int theta0_points = 64;
  int theta1_points = 64;
  double theta0_min = 0.0;
  double theta0_max = 2.0 * 3.14159265358979323846;
  double theta1_min = 0.0;
  double theta1_max = 2.0 * 3.14159265358979323846;

  void validate() const;
  double theta0(int i) const;
  double theta1(int j) const;
};

enum class EvalMode { Exact, Sampled };

/// (1/sqrt2)[sin t0 (|1100> + |0011>) + cos t0 (|1001> - |0110>)] (x) (cos t1 |0> + sin t1 |1>).
QuantumState ansatz_state(const AnsatzAngles& a);

/// Preparation circuit from |00000>; RY(2 theta0) on qubit 0 and
/// RY(2 theta1) on qubit 4 carry the parameters.
Circuit ansatz_circuit(const AnsatzAngles& a);

/// Energies E(i, j) at grid node (theta0(i), theta1(j)).
Eigen::MatrixXd energy_landscape(const PauliSum& h, const LandscapeGrid& g, EvalMode mode,
                                 const std::optional<NoiseSpec>& noise = std::nullopt);

struct VqeResult {
  AnsatzAngles grid_angles;
  double grid_energy = 0.0;
  AnsatzAngles angles;
  double energy = 0.0;
  QuantumState state;
  Eigen::MatrixXd landscape;
};

/// Grid argmin of the device Hamiltonian followed by local quadratic
/// refinement (iterated in exact mode, a single fit in sampled mode).
VqeResult find_ground_state(const ModelParams& p, const LandscapeGrid& g, EvalMode mode,
                            const std::optional<NoiseSpec>& noise = std::nullopt);

}  // namespace hhdmft
