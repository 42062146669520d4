#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hhdmft/kvqa.hpp"
#include "hhdmft/model.hpp"
#include "hhdmft/spectrum.hpp"

namespace hhdmft {

enum class ImpuritySolver { ExactLanczos, KvqaDirect, KvqaVariational, KvqaSampled };
enum class ZMethod { Auto, Peaks, Derivative };

std::string to_string(ImpuritySolver s);
ImpuritySolver impurity_solver_from_string(const std::string& s);
std::string to_string(ZMethod m);
ZMethod z_method_from_string(const std::string& s);

struct DmftConfig {
  double m2 = 1.0;
  double v_initial = 0.8;
  double tol = 1e-3;
  int max_iter = 50;
  double mixing = 0.7;
  ImpuritySolver solver = ImpuritySolver::ExactLanczos;
  /// Auto: derivative for noise-free solvers, peaks for the sampled solver.
  ZMethod z_method = ZMethod::Auto;
  MuConvention mu_convention = MuConvention::HalfFilling;
  /// Krylov depth for the variational solvers; exact solvers run to completion.
  int depth = 2;
  SpectrumSide side = SpectrumSide::Hole;
  KrylovSearchConfig search;
  double derivative_step = 1e-3;
  double derivative_eta = 1e-4;

  void validate() const;
  ZMethod effective_z_method() const;
};

struct DmftIteration {
  double V = 0.0;
  double mu = 0.0;
  double Z = 0.0;
  double v_next = 0.0;
};

struct DmftResult {
  double v_star = 0.0;
  double z_star = 0.0;
  std::vector<DmftIteration> history;
  bool converged = false;
  std::vector<std::string> diagnostics;
};

/// Sum of the weights of the poles nearest zero from above and from below.
double quasiparticle_weight_peaks(const Spectrum& s, std::vector<std::string>* warnings = nullptr);

/// 1 / (z - V^2 / z).
cplx bare_greens(double V, cplx z);

/// Z = 1 / (1 - Re Sigma'(0)) with Sigma = G0^{-1} - G^{-1} differentiated
/// by central differences at +-h, evaluated at Im z = eta.
double quasiparticle_weight_derivative(const Spectrum& g, double V, double h = 1e-3, double eta = 1e-4);

/// sqrt(Z m2).
double update_hybridization(double Z, double m2);

/// Impurity spectrum at hybridization p.V using the configured solver.
Spectrum solve_impurity(const ModelParams& p, const DmftConfig& cfg,
                        const std::optional<NoiseSpec>& noise = std::nullopt,
                        std::vector<std::string>* diagnostics = nullptr);

/// Z at hybridization V, with mu re-resolved per the configured convention.
DmftIteration evaluate_z(ModelParams p, double V, const DmftConfig& cfg,
                         const std::optional<NoiseSpec>& noise = std::nullopt,
                         std::vector<std::string>* diagnostics = nullptr);

DmftResult run_dmft(const ModelParams& p, const DmftConfig& cfg,
                    const std::optional<NoiseSpec>& noise = std::nullopt);

struct ScanPoint {
  double V = 0.0;
  double Z = 0.0;
  double sqrt_zm2 = 0.0;
};

std::vector<ScanPoint> dmft_scan(const ModelParams& p, const DmftConfig& cfg,
                                 const std::vector<double>& v_values,
                                 const std::optional<NoiseSpec>& noise = std::nullopt);

/// First V where V - sqrt(Z m2) changes sign, linearly interpolated.
std::optional<double> scan_crossing(const std::vector<ScanPoint>& scan);

}  // namespace hhdmft
