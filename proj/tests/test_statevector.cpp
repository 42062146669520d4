#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "hhdmft/errors.hpp"
#include "hhdmft/model.hpp"
#include "hhdmft/statevector.hpp"
#include "hhdmft/vqe.hpp"
#include "test_util.hpp"

using namespace hhdmft;
using hhdmft::testing::random_hermitian_sum;
using hhdmft::testing::random_state;
using hhdmft::testing::random_string;

namespace {

const double kPi = std::numbers::pi;

double sample_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

}  // namespace

TEST(QuantumState, ZeroState) {
  const QuantumState s(5);
  EXPECT_EQ(s.dim(), 32u);
  EXPECT_EQ(s[0], cplx(1.0));
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);
}

TEST(QuantumState, BasisPatternUsesLeftmostAsMostSignificant) {
  EXPECT_EQ(init_basis(1, "1")[1], cplx(1.0));
  EXPECT_EQ(init_basis(5, "10010")[0b10010], cplx(1.0));
  EXPECT_THROW(init_basis(5, "1001"), InvalidArgument);
  EXPECT_THROW(init_basis(2, "1x"), InvalidArgument);
}

TEST(QuantumState, RejectsUnnormalizedOrOddSizes) {
  EXPECT_THROW(QuantumState(Eigen::VectorXcd::Ones(4)), InvalidArgument);
  EXPECT_THROW(QuantumState::normalized(Eigen::VectorXcd::Ones(3)), InvalidArgument);
  EXPECT_THROW(QuantumState::normalized(Eigen::VectorXcd::Zero(4)), InvalidArgument);
}

TEST(Gates, RyRotatesByHalfAngle) {
  Circuit c(1);
  c.add(RY{0, 0.7});
  const QuantumState s = apply(c, QuantumState(1));
  EXPECT_NEAR(s[0].real(), std::cos(0.35), 1e-15);
  EXPECT_NEAR(s[1].real(), std::sin(0.35), 1e-15);
}

TEST(Gates, CnotFlipsTargetWhenControlSet) {
  Circuit c(2);
  c.add(CNOT{0, 1});
  EXPECT_NEAR(std::abs(apply(c, init_basis(2, "10"))[0b11]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(apply(c, init_basis(2, "00"))[0b00]), 1.0, 1e-15);
}

TEST(Gates, PauliExpOfBosonX) {
  Circuit c(5);
  const double th = 0.3;
  c.add(PauliExp{PauliString::parse("IIIIX"), th});
  const QuantumState s = apply(c, QuantumState(5));
  EXPECT_NEAR(std::abs(s[0] - std::cos(th)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - cplx(0.0, -std::sin(th))), 0.0, 1e-15);
}

TEST(Gates, CircuitValidatesOperands) {
  Circuit c(2);
  EXPECT_THROW(c.add(RY{2, 0.1}), InvalidArgument);
  EXPECT_THROW(c.add(CNOT{1, 1}), InvalidArgument);
  EXPECT_THROW(c.add(PauliExp{PauliString::parse("XXX"), 0.1}), InvalidArgument);
  EXPECT_THROW(apply(c, QuantumState(3)), InvalidArgument);
}

TEST(Gates, PauliExpMatchesDenseExponential) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const PauliString p = random_string(rng, n);
    const double th = angle(rng);
    const QuantumState s = random_state(rng, n);
    Eigen::VectorXcd psi = s.amplitudes();
    apply_pauli_exp(p, th, psi);
    const Eigen::MatrixXcd u = (cplx(0.0, -th) * to_matrix(p)).exp();
    ASSERT_LT((psi - u * s.amplitudes()).norm(), 1e-9) << p.label();
  }
}

TEST(Gates, NormPreservedOverLongCircuits) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> kind(0, 3), qubit(0, 4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Circuit c(5);
  while (c.gates().size() < 100) {
    const auto q0 = static_cast<std::size_t>(qubit(rng));
    const auto q1 = static_cast<std::size_t>(qubit(rng));
    switch (kind(rng)) {
      case 0:
        c.add(RY{q0, angle(rng)});
        break;
      case 1:
        c.add(XGate{q0});
        break;
      case 2:
        if (q0 != q1) c.add(CNOT{q0, q1});
        break;
      default:
        c.add(PauliExp{random_string(rng, 5), angle(rng)});
    }
  }
  const QuantumState s = apply(c, random_state(rng, 5));
  EXPECT_NEAR(s.norm(), 1.0, 1e-10);
}

TEST(Expectation, PlusStateX) {
  const QuantumState plus = QuantumState::normalized(Eigen::Vector2cd(1.0, 1.0));
  PauliSum x(1);
  x.add(1.0, "X");
  EXPECT_NEAR(expectation(plus, x), 1.0, 1e-15);
}

TEST(Expectation, AnsatzAnchorsOnDeviceHamiltonian) {
  const PauliSum h = build_pauli_hamiltonian(hhdmft::testing::representative());
  EXPECT_NEAR(expectation(ansatz_state({kPi / 2, 0.0}), h), 0.0, 1e-12);
  EXPECT_NEAR(expectation(ansatz_state({0.0, 0.0}), h), -2.0, 1e-12);
}

TEST(Expectation, MatchesDenseMatrixElement) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = random_hermitian_sum(rng, 5, 10);
    const QuantumState s = random_state(rng, 5);
    const cplx ref = s.amplitudes().dot(to_matrix(h) * s.amplitudes());
    ASSERT_NEAR(expectation(s, h), ref.real(), 1e-9);
  }
}

TEST(Expectation, RejectsNonHermitianSums) {
  PauliSum h(1);
  h.add(cplx(0.0, 1.0), "Z");
  EXPECT_THROW(expectation(QuantumState(1), h), InvalidArgument);
}

TEST(Overlap, BasicIdentities) {
  std::mt19937_64 rng(2);
  const QuantumState s = random_state(rng, 4);
  EXPECT_NEAR(std::abs(overlap(s, s) - 1.0), 0.0, 1e-14);
  EXPECT_EQ(overlap(init_basis(1, "0"), init_basis(1, "1")), cplx(0.0));
}

TEST(Overlap, AnsatzFamilyIsCosineOfAngleDifference) {
  for (double t : {0.0, 0.4, 1.3, 2.9}) {
    for (double u : {0.1, 1.7, 4.0}) {
      const cplx o = overlap(ansatz_state({t, 0.6}), ansatz_state({u, 0.6}));
      ASSERT_NEAR(o.real(), std::cos(t - u), 1e-12);
      ASSERT_NEAR(o.imag(), 0.0, 1e-15);
    }
  }
}

TEST(Sampling, IdentityTermIsExact) {
  PauliSum h(5);
  h.add(1.5, "IIIII");
  NoiseSpec noise{7, 0.2, 3};
  EXPECT_DOUBLE_EQ(sample_expectation(QuantumState(5), h, noise), 1.5);
}

TEST(Sampling, DeterministicForFixedSeedAndStream) {
  const PauliSum h = build_pauli_hamiltonian(hhdmft::testing::representative());
  const QuantumState s = ansatz_state({1.0, 5.7});
  const NoiseSpec noise{2000, 0.01, 42};
  EXPECT_EQ(sample_expectation(s, h, noise, 9), sample_expectation(s, h, noise, 9));
  EXPECT_NE(sample_expectation(s, h, noise, 9), sample_expectation(s, h, noise, 10));
}

TEST(Sampling, UnbiasedWithoutReadoutNoise) {
  const PauliSum h = build_pauli_hamiltonian(hhdmft::testing::representative());
  const QuantumState s = ansatz_state({1.0, 5.7});
  const double exact = expectation(s, h);
  std::vector<double> xs;
  for (std::uint64_t r = 0; r < 100; ++r) xs.push_back(sample_expectation(s, h, {32000, 0.0, 1}, r));
  double mean = 0.0;
  for (double x : xs) mean += x / 100.0;
  EXPECT_LT(std::abs(mean - exact), 3.0 * sample_std(xs) / 10.0);
}

TEST(Sampling, StandardErrorScalesWithShots) {
  const PauliSum h = build_pauli_hamiltonian(hhdmft::testing::representative());
  const QuantumState s = ansatz_state({1.0, 5.7});
  std::vector<double> few, many;
  for (std::uint64_t r = 0; r < 100; ++r) {
    few.push_back(sample_expectation(s, h, {2000, 0.0, 5}, r));
    many.push_back(sample_expectation(s, h, {32000, 0.0, 5}, r));
  }
  const double ratio = sample_std(few) / sample_std(many);
  EXPECT_GE(ratio, 2.7);
  EXPECT_LE(ratio, 5.4);
}

TEST(Sampling, ReadoutFlipShrinksParityExpectation) {
  PauliSum z(1);
  z.add(1.0, "Z");
  const double f = 0.1;
  std::vector<double> xs;
  for (std::uint64_t r = 0; r < 50; ++r)
    xs.push_back(sample_expectation(QuantumState(1), z, {32000, f, 0}, r));
  double mean = 0.0;
  for (double x : xs) mean += x / 50.0;
  EXPECT_NEAR(mean, 1.0 - 2.0 * f, 0.01);
}

TEST(Sampling, OverlapEstimate) {
  const QuantumState a = ansatz_state({0.3, 0.2});
  const QuantumState b = ansatz_state({0.9, 0.2});
  const double exact = std::norm(overlap(a, b));
  const double est = sample_overlap(a, b, {200000, 0.0, 1});
  EXPECT_NEAR(est, exact, 5e-3);
  EXPECT_NEAR(sample_overlap(a, a, {1000, 0.0, 1}), 1.0, 1e-12);
}

TEST(Sampling, NoiseSpecValidation) {
  EXPECT_THROW((NoiseSpec{0, 0.0, 0}).validate(), InvalidArgument);
  EXPECT_THROW((NoiseSpec{10, 0.7, 0}).validate(), InvalidArgument);
}
