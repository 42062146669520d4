#pragma once

#include <string>
#include <vector>

namespace hhdmft {

struct Pole {
  double omega;
  double weight;
};

/// Poles sorted by frequency, relative to the Fermi level.
struct Spectrum {
  std::vector<Pole> poles;

  double total_weight() const;
  void sort();
  /// Combines poles closer than tol; the merged position is weight-averaged.
  void merge(double tol = 1e-9);
  /// Removes poles with weight at or below threshold.
  void prune(double threshold = 1e-10);
};

Spectrum combine(const Spectrum& a, const Spectrum& b);

enum class ChainKind { Particle, Hole };

std::string to_string(ChainKind k);

/// Lanczos coefficients a_0..a_d and b_1^2..b_d^2 of the chain started from
/// the (normalized) particle or hole excitation of the ground state.
struct KrylovChain {
  std::vector<double> a;
  std::vector<double> b2;
  double prefactor = 1.0;
  double e0 = 0.0;
  ChainKind kind = ChainKind::Particle;

  std::size_t depth() const noexcept { return b2.size(); }
};

}  // namespace hhdmft
