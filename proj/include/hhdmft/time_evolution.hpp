#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hhdmft/model.hpp"
#include "hhdmft/statevector.hpp"

namespace hhdmft {

struct TimeGrid {
  double t_max = 10.0;
  int n_steps = 200;

  void validate() const;
  double t(int i) const { return t_max * i / n_steps; }
};

/// exp(-i H t) from one eigendecomposition of the dense matrix.
class ExactPropagator {
 public:
  explicit ExactPropagator(const Eigen::MatrixXcd& h);
  explicit ExactPropagator(const PauliSum& h);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const;

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

QuantumState exact_evolve(const QuantumState& s, const PauliSum& h, double t);

/// Term permutation; empty means the order in which terms appear in h.
using TermOrdering = std::vector<std::size_t>;

/// Parses "3,0,1,..." into a permutation of n terms.
TermOrdering parse_ordering(const std::string& text, std::size_t n_terms);
void validate_ordering(const TermOrdering& ordering, std::size_t n_terms);

/// [prod_m exp(-i c_m P_m t / n_t)]^n_t, first-order product formula.
Eigen::VectorXcd trotter_evolve(const Eigen::VectorXcd& psi, const PauliSum& h, double t, int n_t,
                                const TermOrdering& ordering = {});
QuantumState trotter_evolve(const QuantumState& s, const PauliSum& h, double t, int n_t,
                            const TermOrdering& ordering = {});

enum class TimeBackend { Exact, Trotter, Vha };

struct GreensTimeOptions {
  TimeBackend backend = TimeBackend::Exact;
  /// Trotter steps per unit time (at least one step for every t > 0), or
  /// VHA layers.
  int n_t = 10;
  TermOrdering ordering;
  int spin = 0;
};

/// Ground-state inputs shared by all time-domain backends.
struct TimeProblem {
  PauliSum h;
  double e0 = 0.0;
  Eigen::VectorXcd phi_plus;   ///< c^dagger |GS>, unnormalized
  Eigen::VectorXcd phi_minus;  ///< c |GS>, unnormalized
};

/// Exact ground state of the five-qubit model for the given spin.
TimeProblem make_time_problem(const ModelParams& p, int spin = 0);

/// Im G^ret(t) on the grid:
/// G(t) = -i [e^{i E0 t} <phi+|e^{-iHt}|phi+> + e^{-i E0 t} <phi-|e^{iHt}|phi->].
std::vector<double> greens_time(const ModelParams& p, const TimeGrid& g, const GreensTimeOptions& opt = {});

struct VhaTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd thetas;  ///< row per time, column per parameter
  TermOrdering ordering;
  int n_trotter = 1;
  double max_residual = 0.0;
};

struct VhaResult {
  VhaTrajectory forward;   ///< evolves phi+ under H
  VhaTrajectory backward;  ///< evolves phi- under -H
  std::vector<double> img;
};

/// U(theta) = prod_layers prod_m exp(i theta_m P_m); theta integrated by
/// McLachlan's principle A theta_dot = C with RK4.
struct VhaAnsatz {
  PauliSum h;
  TermOrdering ordering;
  int n_layers = 1;

  std::size_t num_parameters() const { return static_cast<std::size_t>(n_layers) * h.size(); }
  Eigen::VectorXcd state(const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0) const;
  /// Columns d|psi>/d theta_k.
  Eigen::MatrixXcd tangents(const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0) const;
};

struct VhaFlowOptions {
  double regularization = 1e-8;
  double residual_tol = 1e-8;
};

/// theta_dot at theta for evolution under `generator`, solving
/// (A + regularization I) theta_dot = C; reports |(A + regularization I) theta_dot - C|.
Eigen::VectorXd mclachlan_rhs(const VhaAnsatz& ansatz, const PauliSum& generator,
                              const Eigen::VectorXd& theta, const Eigen::VectorXcd& psi0,
                              const VhaFlowOptions& opt, double* residual = nullptr);

/// Integrates theta(t) from zero over the grid with RK4 step
/// t_max / (200 n_steps); raises IllConditionedError with the time stamp
/// when the linear solve leaves a residual above tolerance.
VhaTrajectory vha_integrate(const VhaAnsatz& ansatz, const PauliSum& generator, const Eigen::VectorXcd& psi0,
                            const TimeGrid& g, const VhaFlowOptions& opt = {});

VhaResult vha_evolve(const ModelParams& p, const TimeGrid& g, int n_t, const TermOrdering& ordering = {},
                     const VhaFlowOptions& opt = {});

}  // namespace hhdmft
