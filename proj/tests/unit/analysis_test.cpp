#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lrsp/analysis.hpp"
#include "lrsp/errors.hpp"
#include "oracles.hpp"

namespace lrsp {
namespace {

TEST(RankRip, IdentityIsExactIsometry) {
  const auto op = make_identity_operator(10, 12);
  EXPECT_LE(estimate_rank_rip(op, 3, 50, 1), 1e-12);
  EXPECT_LE(estimate_sparse_rip(op, 20, 50, 1), 1e-12);
  EXPECT_LE(estimate_joint_rip(op, 2, 5, 50, 1), 1e-12);
}

TEST(RankRip, DoubledIdentityViolates) {
  const auto op = make_identity_operator(10, 12).scaled(2.0);
  const double d = estimate_rank_rip(op, 2, 20, 1);
  EXPECT_DOUBLE_EQ(d, 1.0);
  EXPECT_TRUE(rip_violated(d));
  EXPECT_TRUE(rip_violated(estimate_sparse_rip(op, 3, 20, 1)));
}

TEST(RankRip, GaussianOperatorIsNearIsometryOnRankOne) {
  const auto op = make_gaussian_operator(20, 20, 2000, 7);
  const double d = estimate_rank_rip(op, 1, 500, 3);
  EXPECT_GT(d, 0.0);
  EXPECT_LT(d, 0.5);
  EXPECT_FALSE(rip_violated(d));
}

TEST(RankRip, NondecreasingInOrder) {
  const auto op = make_gaussian_operator(12, 14, 150, 2);
  double prev = 0.0;
  for (Index k = 1; k <= 6; ++k) {
    const double d = estimate_rank_rip(op, k, 40, 9);
    EXPECT_GE(d, prev);
    prev = d;
  }
  prev = 0.0;
  for (Index s = 1; s <= 40; s += 3) {
    const double d = estimate_sparse_rip(op, s, 40, 9);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(SparseRip, FullSupportDominatesSmallerOrders) {
  const auto op = make_gaussian_operator(6, 7, 80, 4);
  const double full = estimate_sparse_rip(op, 42, 30, 5);
  EXPECT_GE(full, estimate_sparse_rip(op, 21, 30, 5));
  EXPECT_GE(full, estimate_sparse_rip(op, 1, 30, 5));
  EXPECT_LE(full, 1.0);
}

TEST(RankRip, RejectsBadOrders) {
  const auto op = make_identity_operator(4, 5);
  EXPECT_THROW(estimate_rank_rip(op, 0, 10, 1), ArgumentError);
  EXPECT_THROW(estimate_rank_rip(op, 5, 10, 1), ArgumentError);
  EXPECT_THROW(estimate_sparse_rip(op, 21, 10, 1), ArgumentError);
  EXPECT_THROW(estimate_rank_rip(op, 1, 0, 1), ArgumentError);
  EXPECT_THROW(estimate_cross_rip(op, 3, 0, 10, 1), ArgumentError);
}

TEST(CrossRip, IdentityMatchesRestrictedEnergy) {
  // For A = I the ratio is ||L_F||_F / ||L||_F, at most 1 and growing with |F|.
  const auto op = make_identity_operator(8, 9);
  const double small = estimate_cross_rip(op, 4, 2, 50, 3);
  const double large = estimate_cross_rip(op, 30, 2, 50, 3);
  EXPECT_GT(small, 0.0);
  EXPECT_LE(large, 1.0 + 1e-12);
  EXPECT_GT(large, small);
  EXPECT_NEAR(estimate_cross_rip(op, 72 - 2, 2, 5, 3), 1.0, 0.2);
}

TEST(CrossRip, DeterministicForSeed) {
  const auto op = make_gaussian_operator(10, 10, 60, 1);
  EXPECT_EQ(estimate_cross_rip(op, 5, 1, 20, 4), estimate_cross_rip(op, 5, 1, 20, 4));
  EXPECT_EQ(estimate_joint_rip(op, 1, 5, 20, 4), estimate_joint_rip(op, 1, 5, 20, 4));
}

TEST(RipProfile, ClampsOrdersAndOrdersJointConstants) {
  const auto op = make_gaussian_operator(5, 6, 40, 3);
  const RipProfile p = estimate_rip_profile(op, 2, 10, 20, 1);  // 4k = 8 > 5, 4s = 40 > 30
  EXPECT_GE(p.delta_4k, p.delta_3k);
  EXPECT_GE(p.delta_4s, p.delta_3s);
  EXPECT_GE(p.delta_joint_3k4s, p.delta_joint_3k3s);
}

TEST(Contraction, PinnedEntriesEqualOrder) {
  const auto c = theorem2_contraction(RipProfile::from_order4(0.09, 0.095, 0.095), 0.25);
  EXPECT_NEAR(c.alpha(), 0.466813, 1e-6);
  EXPECT_NEAR(c.beta(), 0.208791, 1e-6);
  EXPECT_NEAR(c.zeta(), 0.209945, 1e-6);
  EXPECT_NEAR(c.gamma(), 0.419890, 1e-6);
  EXPECT_EQ(c.delta_hat.rows(), 4);
  EXPECT_EQ(c.delta_hat.block(0, 0, 2, 2), 1.25 * c.delta);
  EXPECT_EQ(c.delta_hat.block(0, 2, 2, 2), 0.25 * c.delta);
  EXPECT_EQ(c.delta_hat.block(2, 0, 2, 2), Matrix::Identity(2, 2));
  EXPECT_EQ(c.delta_hat.block(2, 2, 2, 2), Matrix::Zero(2, 2));
}

TEST(Contraction, PinnedEntriesDistinctOrders) {
  RipProfile p{0.05, 0.08, 0.06, 0.10, 0.07, 0.09};
  const auto c = theorem2_contraction(p, 0.0);
  EXPECT_NEAR(c.alpha(), 0.254316, 1e-6);
  EXPECT_NEAR(c.beta(), 0.147368, 1e-6);
  EXPECT_NEAR(c.zeta(), 0.191489, 1e-6);
  EXPECT_NEAR(c.gamma(), 0.340426, 1e-6);
}

TEST(Contraction, ZeroConstantsGiveZeroRecursion) {
  const auto c = theorem2_contraction(RipProfile{}, 0.5);
  EXPECT_EQ(c.delta, Matrix::Zero(2, 2));
  EXPECT_DOUBLE_EQ(spectral_radius(c.delta_hat), 0.0);
}

TEST(Contraction, RejectsOutOfRangeInputs) {
  EXPECT_THROW(theorem2_contraction(RipProfile::from_order4(1.0, 0.1, 0.1), 0.25), ArgumentError);
  EXPECT_THROW(theorem2_contraction(RipProfile::from_order4(0.1, -0.1, 0.1), 0.25), ArgumentError);
  EXPECT_THROW(theorem2_contraction(RipProfile::from_order4(0.1, 0.1, 0.1), -0.5), ArgumentError);
}

TEST(SpectralRadius, KnownMatrices) {
  EXPECT_NEAR(spectral_radius(Matrix::Identity(3, 3)), 1.0, 1e-14);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -0.7;
  EXPECT_NEAR(spectral_radius(d), 0.7, 1e-14);
  Matrix rot(2, 2);
  rot << 0.0, -0.5, 0.5, 0.0;  // eigenvalues +-0.5i
  EXPECT_NEAR(spectral_radius(rot), 0.5, 1e-14);
  EXPECT_THROW(spectral_radius(Matrix::Zero(2, 3)), ArgumentError);
}

TEST(SpectralRadius, PositiveMatricesMatchPowerIteration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m = testing::random_matrix(4, 4, seed).cwiseAbs() + Matrix::Constant(4, 4, 0.01);
    EXPECT_NEAR(spectral_radius(m), testing::power_iteration_radius(m), 1e-8);
  }
}

TEST(SpectralRadius, CompanionReductionMatchesGenericSolver) {
  for (double tau : {0.0, 0.1, 0.25, 0.5, 0.9}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix d = 0.3 * testing::random_matrix(2, 2, seed).cwiseAbs();
      Matrix hat = Matrix::Zero(4, 4);
      hat.topLeftCorner(2, 2) = (1.0 + tau) * d;
      hat.topRightCorner(2, 2) = tau * d;
      hat.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
      EXPECT_NEAR(companion_spectral_radius(d, tau), spectral_radius(hat), 1e-10);
    }
  }
  const auto c = theorem2_contraction(RipProfile::from_order4(0.09, 0.095, 0.095), 0.25);
  EXPECT_NEAR(companion_spectral_radius(c.delta, 0.25), spectral_radius(c.delta_hat), 1e-10);
}

TEST(Recursion, ZeroMatrixKillsStateInOneStep) {
  const auto env = simulate_recursion(Matrix::Zero(4, 4), Vector::Ones(4), 3);
  ASSERT_EQ(env.states.size(), 4u);
  EXPECT_EQ(env.states[1], Vector::Zero(4));
  EXPECT_EQ(env.steps_to_fraction(1e-6), 1);
  EXPECT_TRUE(env.converges);
}

TEST(Recursion, StaysNonnegativeAndDecaysWhenStable) {
  const auto c = theorem2_contraction(RipProfile::from_order4(0.05, 0.05, 0.05), 0.25);
  const auto env = simulate_recursion(c.delta_hat, Vector::Ones(4), 200);
  EXPECT_TRUE(env.converges);
  for (const auto& w : env.states) EXPECT_TRUE((w.array() >= 0.0).all());
  EXPECT_LT(env.states.back().maxCoeff(), 1e-6);
  const int steps = env.steps_to_fraction(1e-3);
  EXPECT_GT(steps, 0);
  // Asymptotic decay rate approaches the spectral radius.
  const double ratio = env.states[200].maxCoeff() / env.states[199].maxCoeff();
  EXPECT_NEAR(ratio, env.spectral_radius, 1e-3);
}

TEST(Recursion, DivergesWhenUnstable) {
  const auto c = theorem2_contraction(RipProfile::from_order4(0.3, 0.3, 0.3), 0.25);
  const auto env = simulate_recursion(c.delta_hat, Vector::Ones(4), 50);
  EXPECT_FALSE(env.converges);
  EXPECT_GT(env.states.back().maxCoeff(), env.states.front().maxCoeff());
  EXPECT_EQ(env.steps_to_fraction(1e-3), -1);
  EXPECT_THROW(simulate_recursion(c.delta_hat, -Vector::Ones(4), 5), ArgumentError);
}

TEST(Theorem1, PublishedCouplingContracts) {
  const Matrix r = Theorem1Constants::published().coupling();
  const double rho = spectral_radius(r);
  EXPECT_LT(rho, 1.0);
  EXPECT_NEAR(rho, testing::power_iteration_radius(r), 1e-8);
  // Closed form for a 2x2: (tr + sqrt(tr^2 - 4 det)) / 2.
  const double tr = r.trace();
  const double det = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
  EXPECT_NEAR(rho, 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det)), 1e-12);
}

TEST(Theorem1, NoiseFloorSolvesTheFixedPoint) {
  const auto k = Theorem1Constants::published();
  EXPECT_EQ(noise_floor(k, 0.0), Vector::Zero(2));
  const Vector one = noise_floor(k, 1.0);
  // Cramer's rule on (I - R) w = g.
  const double a = 1.0 - k.rho_1L, b = -k.rho_1M, c = -k.rho_2L, d = 1.0 - k.rho_2M;
  const double det = a * d - b * c;
  EXPECT_NEAR(one(0), (k.gamma_1 * d - b * k.gamma_2) / det, 1e-12);
  EXPECT_NEAR(one(1), (a * k.gamma_2 - c * k.gamma_1) / det, 1e-12);
  EXPECT_LE((noise_floor(k, 0.37) - 0.37 * one).norm(), 1e-12);
  // Fixed point of the recursion.
  const Vector g = (Vector(2) << k.gamma_1, k.gamma_2).finished();
  EXPECT_LE((k.coupling() * one + g - one).norm(), 1e-12);
}

TEST(Theorem1, NoFixedPointWhenCouplingExpands) {
  Theorem1Constants k;
  k.rho_1L = 0.9;
  k.rho_2M = 0.9;
  EXPECT_THROW(noise_floor(k, 1.0), ArgumentError);
  EXPECT_THROW(noise_floor(Theorem1Constants{}, -1.0), ArgumentError);
}

TEST(Output, VerdictAndCsv) {
  EXPECT_EQ(stability_verdict(0.5), "STABLE rho=0.500000");
  EXPECT_EQ(stability_verdict(1.0), "UNSTABLE rho=1.000000");
  std::ostringstream out;
  write_quantities_csv(out, {{"alpha", 0.5}, {"rho", 0.25}});
  EXPECT_EQ(out.str(), "quantity,value\nalpha,0.5\nrho,0.25\n");
}

}  // namespace
}  // namespace lrsp
