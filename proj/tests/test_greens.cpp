#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hhdmft/ed.hpp"
#include "hhdmft/errors.hpp"
#include "hhdmft/greens.hpp"
#include "test_util.hpp"

using namespace hhdmft;

namespace {

const cplx I1(0.0, 1.0);

KrylovChain chain(std::vector<double> a, std::vector<double> b2, double prefactor) {
  KrylovChain c;
  c.a = std::move(a);
  c.b2 = std::move(b2);
  c.prefactor = prefactor;
  return c;
}

KrylovChain random_chain(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> a(-3.0, 3.0), b(0.1, 4.0);
  KrylovChain c;
  for (int n = 0; n <= depth; ++n) c.a.push_back(a(rng));
  for (int n = 0; n < depth; ++n) c.b2.push_back(b(rng));
  c.prefactor = 0.5;
  return c;
}

}  // namespace

TEST(ContinuedFraction, SinglePole) {
  EXPECT_NEAR(std::abs(continued_fraction(I1, chain({0.0}, {}, 0.5)) - (-0.5 * I1)), 0.0, 1e-15);
}

TEST(ContinuedFraction, TwoLevels) {
  EXPECT_NEAR(std::abs(continued_fraction(I1, chain({0.0, 0.0}, {1.0}, 0.5)) - (-0.25 * I1)), 0.0, 1e-15);
}

TEST(ContinuedFraction, PoleHit) {
  EXPECT_THROW(continued_fraction(cplx(0.0), chain({0.0}, {}, 1.0)), PoleHitError);
}

TEST(ContinuedFraction, EqualsPoleSumOffAxis) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> x(-6.0, 6.0), y(0.05, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const KrylovChain c = random_chain(rng, 1 + trial % 4);
    Spectrum s;
    s.poles = tridiagonal_poles(c);
    for (int k = 0; k < 10; ++k) {
      const cplx z(x(rng), (k % 2 ? 1.0 : -1.0) * y(rng));
      ASSERT_LT(std::abs(continued_fraction(z, c) - greens(s, z)), 1e-9);
    }
  }
}

TEST(PolesWeights, TwoByTwo) {
  const Spectrum s = poles_weights(chain({0.0, 0.0}, {1.0}, 0.5));
  ASSERT_EQ(s.poles.size(), 2u);
  EXPECT_NEAR(s.poles[0].omega, -1.0, 1e-12);
  EXPECT_NEAR(s.poles[1].omega, 1.0, 1e-12);
  EXPECT_NEAR(s.poles[0].weight, 0.25, 1e-12);
  EXPECT_NEAR(s.poles[1].weight, 0.25, 1e-12);
}

TEST(PolesWeights, WeightsSumToPrefactor) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    ASSERT_NEAR(poles_weights(random_chain(rng, 3)).total_weight(), 0.5, 1e-10);
  }
}

TEST(PolesWeights, ShiftedByGroundEnergy) {
  KrylovChain c = chain({-1.0}, {}, 1.0);
  c.e0 = -3.0;
  c.kind = ChainKind::Particle;
  EXPECT_NEAR(poles_weights(c).poles[0].omega, 2.0, 1e-15);
  c.kind = ChainKind::Hole;
  EXPECT_NEAR(poles_weights(c).poles[0].omega, -2.0, 1e-15);
}

TEST(PolesWeights, DepthTwoChainHasThreePoles) {
  const ModelParams p = hhdmft::testing::half_filled();
  const Eigen::MatrixXcd h = build_full_hamiltonian(p);
  const GroundState gs = ground_state(diagonalize(h));
  KrylovChain c = reference_lanczos(h, impurity_annihilation_matrix(0, 2).adjoint() * gs.vector, 2);
  c.e0 = gs.energy;
  EXPECT_EQ(poles_weights(c).poles.size(), 3u);
}

TEST(ChainGreens, MatchesPoleSumForBothKinds) {
  std::mt19937_64 rng(12);
  for (ChainKind kind : {ChainKind::Particle, ChainKind::Hole}) {
    KrylovChain c = random_chain(rng, 2);
    c.e0 = -1.3;
    c.kind = kind;
    const Spectrum s = poles_weights(c);
    for (double x : {-2.0, 0.3, 4.1}) {
      const cplx z(x, 0.1);
      EXPECT_LT(std::abs(chain_greens(c, z) - greens(s, z)), 1e-10);
    }
  }
}

TEST(ChainGreens, FullDepthMatchesLehmann) {
  const ModelParams p = hhdmft::testing::half_filled();
  const Eigen::MatrixXcd h = build_full_hamiltonian(p);
  const GroundState gs = ground_state(diagonalize(h));
  const Eigen::MatrixXcd c = impurity_annihilation_matrix(0, 2);
  KrylovChain part = reference_lanczos(h, c.adjoint() * gs.vector, 32);
  part.e0 = gs.energy;
  part.kind = ChainKind::Particle;
  KrylovChain hole = reference_lanczos(h, c * gs.vector, 32);
  hole.e0 = gs.energy;
  hole.kind = ChainKind::Hole;
  const Spectrum lehmann = lehmann_greens(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-10.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    const cplx z(x(rng), 0.1);
    ASSERT_LT(std::abs(chain_greens(part, z) + chain_greens(hole, z) - greens(lehmann, z)), 1e-8);
  }
}

TEST(Assemble, MirrorsParticlePoles) {
  Spectrum part;
  part.poles = {{1.0, 0.25}, {3.0, 0.25}};
  const Spectrum s = assemble_particle_hole(part);
  ASSERT_EQ(s.poles.size(), 4u);
  const std::vector<double> omegas = {-3.0, -1.0, 1.0, 3.0};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(s.poles[k].omega, omegas[k]);
    EXPECT_DOUBLE_EQ(s.poles[k].weight, 0.25);
  }
}

TEST(Assemble, NonInteractingChain) {
  KrylovChain c = chain({0.8}, {}, 0.5);
  const Spectrum s = assemble_particle_hole(poles_weights(c));
  ASSERT_EQ(s.poles.size(), 2u);
  EXPECT_NEAR(s.poles[0].omega, -0.8, 1e-15);
  EXPECT_NEAR(s.poles[1].weight, 0.5, 1e-15);
}

TEST(SpectrumOps, MergeCombinesCoincidentPoles) {
  Spectrum s;
  s.poles = {{1.0, 0.2}, {1.0 + 1e-12, 0.3}, {2.0, 1e-12}};
  s.merge();
  s.prune();
  ASSERT_EQ(s.poles.size(), 1u);
  EXPECT_NEAR(s.poles[0].weight, 0.5, 1e-15);
}

TEST(SpectralFunction, LorentzianPeakHeight) {
  Spectrum s;
  s.poles = {{0.0, 1.0}};
  FrequencyGrid g{-1.0, 1.0, 3, 0.1};
  const SpectralCurve c = spectral_function(s, g);
  EXPECT_NEAR(c.A[1], 1.0 / (0.1 * std::numbers::pi), 1e-12);
  g.delta = 0.05;
  EXPECT_NEAR(spectral_function(s, g).A[1] / c.A[1], 2.0, 0.01);
}

TEST(SpectralFunction, QuadratureRecoversWeight) {
  const Spectrum s = lehmann_greens(hhdmft::testing::half_filled());
  const FrequencyGrid g{-20.0, 20.0, 8001, 0.1};
  const SpectralCurve c = spectral_function(s, g);
  double integral = 0.0;
  for (std::size_t i = 1; i < c.A.size(); ++i) {
    integral += 0.5 * (c.A[i] + c.A[i - 1]) * (c.omega[i] - c.omega[i - 1]);
  }
  EXPECT_NEAR(integral, s.total_weight(), 0.02 * s.total_weight());
}

TEST(SpectralFunction, MirrorSymmetricForAssembledSpectra) {
  Spectrum part;
  part.poles = {{0.6, 0.3}, {2.9, 0.15}, {7.0, 0.05}};
  const SpectralCurve c = spectral_function(assemble_particle_hole(part), FrequencyGrid{});
  for (std::size_t i = 0; i < c.A.size(); ++i) ASSERT_NEAR(c.A[i], c.A[c.A.size() - 1 - i], 1e-12);
}

TEST(FrequencyGrid, Validation) {
  EXPECT_THROW((FrequencyGrid{1.0, -1.0, 10, 0.1}).validate(), InvalidArgument);
  EXPECT_THROW((FrequencyGrid{-1.0, 1.0, 1, 0.1}).validate(), InvalidArgument);
  EXPECT_THROW((FrequencyGrid{-1.0, 1.0, 10, 0.0}).validate(), InvalidArgument);
  EXPECT_DOUBLE_EQ((FrequencyGrid{}).omega(1200), 0.0);
}
