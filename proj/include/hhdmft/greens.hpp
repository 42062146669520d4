#pragma once

#include <complex>
#include <vector>

#include "hhdmft/spectrum.hpp"

namespace hhdmft {

using cplx = std::complex<double>;

struct FrequencyGrid {
  double omega_min = -12.0;
  double omega_max = 12.0;
  int n_points = 2401;
  double delta = 0.1;

  void validate() const;
  double omega(int i) const;
};

/// prefactor / (z - a0 - b1^2 / (z - a1 - ...)) in the chain's own energy
/// variable. Throws PoleHitError if a denominator vanishes.
cplx continued_fraction(cplx z, const KrylovChain& chain);

/// Eigenvalues of the tridiagonal matrix with weights prefactor * |v_0|^2,
/// in the chain's own energy variable.
std::vector<Pole> tridiagonal_poles(const KrylovChain& chain);

/// Poles relative to the Fermi level: E - e0 for particle chains and
/// e0 - E for hole chains. Coincident poles are merged.
Spectrum poles_weights(const KrylovChain& chain, double merge_tol = 1e-9);

/// Green's function of a chain at frequency z relative to the Fermi level.
cplx chain_greens(const KrylovChain& chain, cplx z);

/// Adds the mirror image (-omega, w) of every particle pole.
Spectrum assemble_particle_hole(const Spectrum& particle);

/// Sum_k w_k / (z - omega_k).
cplx greens(const Spectrum& s, cplx z);

struct SpectralCurve {
  std::vector<double> omega;
  std::vector<double> A;
  std::vector<double> ReG;
  std::vector<double> ImG;
};

/// A(omega) = -Im G(omega + i delta) / pi.
SpectralCurve spectral_function(const Spectrum& s, const FrequencyGrid& g);

}  // namespace hhdmft
