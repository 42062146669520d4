#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hhdmft/model.hpp"
#include "hhdmft/spectrum.hpp"
#include "hhdmft/statevector.hpp"
#include "hhdmft/time_evolution.hpp"
#include "hhdmft/vqe.hpp"

namespace hhdmft {

enum class KrylovMode { Direct, VariationalExact, VariationalSampled };
enum class GroundStateSource { Vqe, Ed };
enum class SpectrumSide { Hole, Particle, Both };

std::string to_string(KrylovMode m);
KrylovMode krylov_mode_from_string(const std::string& s);
std::string to_string(GroundStateSource g);
GroundStateSource ground_state_source_from_string(const std::string& s);
std::string to_string(SpectrumSide s);
SpectrumSide spectrum_side_from_string(const std::string& s);

struct ShortTimeConfig {
  int t_points = 10;
  double t_min = 0.01;
  double t_max = 0.3;
  /// Single first-order Trotter step for each e^{-iHt} instead of exact evolution.
  bool trotter = false;
  TermOrdering ordering;

  void validate() const;
};

struct KrylovSearchConfig {
  /// Scan grid for the two angles of each step's state family.
  LandscapeGrid grid;
  ShortTimeConfig short_time{10, 0.01, 0.3, true, {}};
  /// Unset means 1e-10 in direct mode and 1e-3 otherwise.
  std::optional<double> b2_floor;
  KrylovMode mode = KrylovMode::Direct;
  /// Local refinement of the grid argmin (never accepted if it raises the cost).
  bool refine = true;

  double effective_b2_floor() const;
  void validate() const;
};

struct Chi0 {
  QuantumState state;
  double norm2 = 0.0;
};

/// c_imp-up |gs> (hole) or c_imp-up^dagger |gs> (particle), normalized.
Chi0 chi0(const QuantumState& gs, ChainKind kind);

struct Epsilons {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double sum() const { return e0 + e1 + e2; }
};

/// (|<c|H|prev>|/bn - 1)^2, |<c|prev>|^2, |<c|prev2>|^2 (zero without prev2).
Epsilons cost_epsilons(const QuantumState& candidate, const QuantumState& prev, const QuantumState* prev2,
                       const PauliSum& h, double bn);

/// |<a|e^{-iHt}|b>| / t sampled on the configured times and extrapolated
/// linearly to t = 0.
double short_time_matrix_element(const QuantumState& a, const QuantumState& b, const PauliSum& h,
                                 const ShortTimeConfig& cfg);
/// As above with each |<a|U(t)|b>|^2 estimated from shots.
double short_time_matrix_element(const QuantumState& a, const QuantumState& b, const PauliSum& h,
                                 const ShortTimeConfig& cfg, const NoiseSpec& noise, std::uint64_t stream);

/// Real two-angle state families used by the variational search.
/// Level 0: (cos a |f1> + sin a |f2>) (x) (cos b |0> + sin b |1>) over the two
/// fermion patterns of the excitation sector.
/// Level n > 0: cos a e1 + sin a (cos b e2 + sin b e3), with e1..e3 an
/// orthonormal basis of the four-state sector orthogonal to the previous
/// Krylov state.
class SectorFamily {
 public:
  static SectorFamily product(ChainKind kind);
  static SectorFamily complement(ChainKind kind, const QuantumState& prev);

  QuantumState state(const AnsatzAngles& a) const;

 private:
  bool product_ = true;
  std::vector<Eigen::VectorXcd> basis_;
};

/// The four computational basis indices of the hole or particle sector.
std::vector<int> sector_indices(ChainKind kind);

struct KrylovStep {
  int n = 0;
  AnsatzAngles angles;
  double cost = 0.0;
  Epsilons eps;
  std::optional<AnsatzAngles> alternate;
  double alternate_cost = 0.0;
  Eigen::MatrixXd surface;
};

enum class Termination { DepthReached, Floor, NegativeB2 };
std::string to_string(Termination t);

struct KrylovResult {
  KrylovChain chain;
  std::vector<QuantumState> states;
  std::vector<KrylovStep> steps;
  Termination termination = Termination::DepthReached;
  std::vector<std::string> diagnostics;
};

/// Krylov chain for one excitation kind started from gs. a_n and b_n^2 come
/// from <H> and <H^2> of each state with b_{n+1}^2 = <H^2> - a_n^2 - b_n^2.
KrylovResult krylov_chain(const QuantumState& gs, const PauliSum& h, ChainKind kind, int depth,
                          const KrylovSearchConfig& cfg,
                          const std::optional<NoiseSpec>& noise = std::nullopt);

}  // namespace hhdmft
