#include <gtest/gtest.h>

#include "lrsp/errors.hpp"
#include "lrsp/solvers.hpp"
#include "oracles.hpp"

namespace lrsp {
namespace {

using testing::random_matrix;

const CgOptions kTightCg{1e-12, 500};

TEST(StepSize, IdentityIsOne) {
  const auto op = make_identity_operator(5, 6);
  const Matrix g = random_matrix(5, 6, 1);
  const SubspaceBasis b = SubspaceBasis::orthonormalize(random_matrix(5, 2, 2));
  EXPECT_NEAR(step_size(op, g, b), 1.0, 1e-14);
  EXPECT_NEAR(step_size(op, g, SupportSet::from_linear(5, 6, {1, 4, 9})), 1.0, 1e-14);
}

TEST(StepSize, MaskWithGradientOnOmega) {
  const auto op = make_mask_operator(6, 6, 0.5, 3);
  const Matrix g = restrict_to_support(random_matrix(6, 6, 4), op.observed());
  EXPECT_NEAR(step_size(op, g, op.observed()), 1.0, 1e-14);
}

TEST(StepSize, ZeroRestrictedGradientGivesZero) {
  const auto op = make_gaussian_operator(4, 4, 10, 5);
  Matrix g = Matrix::Zero(4, 4);
  g(0, 0) = 1.0;
  EXPECT_EQ(step_size(op, g, SupportSet::from_linear(4, 4, {5})), 0.0);
  EXPECT_EQ(step_size(op, Matrix::Zero(4, 4), SubspaceBasis::orthonormalize(random_matrix(4, 1, 6))),
            0.0);
}

// f(Q - (mu/2) g) over a grid of mu should bottom out at the returned step.
TEST(StepSize, GaussianMinimizesAlongRestrictedGradient) {
  const auto op = make_gaussian_operator(8, 7, 40, 7);
  Rng rng(8);
  const Vector y = gaussian_vector(40, rng);
  const Matrix q = gaussian_matrix(8, 7, rng);
  const Matrix grad = gradient(op, y, q);
  const SubspaceBasis basis = SubspaceBasis::orthonormalize(gaussian_matrix(8, 3, rng));
  const SupportSet support = SupportSet::from_linear(8, 7, {0, 3, 10, 22, 31, 40, 55});

  auto check = [&](const Matrix& g, double mu) {
    ASSERT_GT(mu, 0.0);
    double best_mu = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 4000; ++i) {
      const double trial = mu * 2.0 * i / 4000.0;
      const double f = testing::objective(op, y, q - 0.5 * trial * g);
      if (f < best_f) {
        best_f = f;
        best_mu = trial;
      }
    }
    EXPECT_NEAR(best_mu, mu, mu * 1e-3);
  };
  check(project_onto_basis(grad, basis), step_size(op, grad, basis));
  check(restrict_to_support(grad, support), step_size(op, grad, support));
}

TEST(RestrictedLeastSquares, IdentityFullSpaceReturnsData) {
  const auto op = make_identity_operator(4, 5);
  const Matrix truth = random_matrix(4, 5, 9);
  const SubspaceBasis full = SubspaceBasis::orthonormalize(random_matrix(4, 4, 10));
  const auto res = restricted_least_squares(op, apply(op, truth), full, Matrix::Zero(4, 5), kTightCg);
  EXPECT_TRUE(res.converged);
  EXPECT_LE((res.solution - truth).norm(), 1e-10 * truth.norm());
}

TEST(RestrictedLeastSquares, IdentitySupportScatters) {
  const auto op = make_identity_operator(4, 5);
  const Matrix data = random_matrix(4, 5, 11);
  const SupportSet s = SupportSet::from_linear(4, 5, {0, 6, 13, 19});
  const auto res = restricted_least_squares(op, apply(op, data), s, Matrix::Zero(4, 5), kTightCg);
  EXPECT_LE((res.solution - restrict_to_support(data, s)).norm(), 1e-12);
}

TEST(RestrictedLeastSquares, BasisMatchesPseudoinverse) {
  const Index m = 8;
  const Index n = 8;
  const auto op = make_gaussian_operator(m, n, 40, 12);
  Rng rng(13);
  const Vector y = gaussian_vector(40, rng);
  const Matrix fixed = gaussian_matrix(m, n, rng);
  const SubspaceBasis basis = SubspaceBasis::orthonormalize(gaussian_matrix(m, 2, rng));

  // Unknowns W (2 x n), V = B W; design matrix column for W(a, j) is A(b_a e_j^T).
  Eigen::MatrixXd design(40, 2 * n);
  for (Index r = 0; r < 2; ++r) {
    for (Index j = 0; j < n; ++j) {
      Matrix atom = Matrix::Zero(m, n);
      atom.col(j) = basis.vectors().col(r);
      design.col(r * n + j) = op.apply(atom);
    }
  }
  const Eigen::VectorXd rhs = y - op.apply(fixed);
  const Eigen::VectorXd w = design.completeOrthogonalDecomposition().solve(rhs);
  Matrix expected = Matrix::Zero(m, n);
  for (Index r = 0; r < 2; ++r) {
    for (Index j = 0; j < n; ++j) expected.col(j) += w(r * n + j) * basis.vectors().col(r);
  }
  const auto res = restricted_least_squares(op, y, basis, fixed, kTightCg);
  EXPECT_LE((res.solution - expected).norm(), 1e-8 * expected.norm());
}

TEST(RestrictedLeastSquares, SupportMatchesPseudoinverse) {
  const auto op = make_gaussian_operator(6, 6, 25, 14);
  Rng rng(15);
  const Vector y = gaussian_vector(25, rng);
  const SupportSet s = SupportSet::from_linear(6, 6, {1, 5, 8, 13, 21, 30, 35});
  const Eigen::MatrixXd a = testing::dense_operator(op);
  Eigen::MatrixXd design(25, s.size());
  for (Index i = 0; i < s.size(); ++i) design.col(i) = a.col(s.linear()[static_cast<std::size_t>(i)]);
  const Eigen::VectorXd v = design.colPivHouseholderQr().solve(y);
  Matrix expected = Matrix::Zero(6, 6);
  for (Index i = 0; i < s.size(); ++i) expected.data()[s.linear()[static_cast<std::size_t>(i)]] = v(i);
  const auto res = restricted_least_squares(op, y, s, Matrix::Zero(6, 6), kTightCg);
  EXPECT_LE((res.solution - expected).norm(), 1e-8 * expected.norm());
}

TEST(RestrictedLeastSquares, WarmStartFromSolutionConvergesImmediately) {
  const auto op = make_gaussian_operator(6, 6, 25, 16);
  Rng rng(17);
  const Vector y = gaussian_vector(25, rng);
  const SupportSet s = SupportSet::from_linear(6, 6, {2, 9, 17});
  const auto first = restricted_least_squares(op, y, s, Matrix::Zero(6, 6), kTightCg);
  const auto again =
      restricted_least_squares(op, y, s, Matrix::Zero(6, 6), CgOptions{1e-6, 50}, &first.solution);
  EXPECT_EQ(again.iterations, 0);
}

TEST(RestrictedLeastSquares, StagnationReturnsBestIterate) {
  const auto op = make_gaussian_operator(10, 10, 60, 18);
  Rng rng(19);
  const Vector y = gaussian_vector(60, rng);
  const SubspaceBasis basis = SubspaceBasis::orthonormalize(gaussian_matrix(10, 4, rng));
  const auto res = restricted_least_squares(op, y, basis, Matrix::Zero(10, 10), CgOptions{1e-14, 2});
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 2);
  EXPECT_GT(res.relative_residual, 1e-14);
  EXPECT_TRUE(res.solution.allFinite());
}

TEST(RestrictedLeastSquares, RejectsEmptyRestriction) {
  const auto op = make_identity_operator(3, 3);
  const Vector y = Vector::Zero(9);
  EXPECT_THROW(restricted_least_squares(op, y, SubspaceBasis(3), Matrix::Zero(3, 3), kTightCg),
               ArgumentError);
  EXPECT_THROW(restricted_least_squares(op, y, SupportSet(3, 3), Matrix::Zero(3, 3), kTightCg),
               ArgumentError);
}

}  // namespace
}  // namespace lrsp
