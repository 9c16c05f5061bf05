#include <gtest/gtest.h>

#include <sstream>

#include "lrsp/errors.hpp"
#include "lrsp/instance.hpp"
#include "lrsp/solvers.hpp"
#include "oracles.hpp"

namespace lrsp {
namespace {

SyntheticInstance completion_instance(Index m, Index n, Index k, std::uint64_t seed,
                                      double fraction = 0.5) {
  InstanceParams p;
  p.rows = m;
  p.cols = n;
  p.rank = k;
  p.model = ObservationModel::mask(fraction);
  p.seed = seed;
  return generate_instance(p);
}

SyntheticInstance joint_gaussian_instance(std::uint64_t seed) {
  InstanceParams p;
  p.rows = 30;
  p.cols = 40;
  p.rank = 2;
  p.sparsity = 12;
  p.model = ObservationModel::gaussian(600);
  p.seed = seed;
  return generate_instance(p);
}

TEST(Alps, RecoversSmallCompletion) {
  const auto inst = completion_instance(40, 50, 2, 1);
  const auto res = alps_solve(inst.problem(), SolverConfig{});
  EXPECT_TRUE(res.trace.converged);
  EXPECT_LE(relative_error(res.state.estimate, inst.truth()), 1e-3);
}

TEST(Sparcs, RecoversSmallCompletion) {
  const auto inst = completion_instance(40, 50, 2, 2);
  const auto res = sparcs_solve(inst.problem(), SolverConfig{});
  EXPECT_TRUE(res.trace.converged);
  EXPECT_LE(relative_error(res.state.estimate, inst.truth()), 1e-3);
}

TEST(Sparcs, JointRecoveryGaussianOperator) {
  const auto inst = joint_gaussian_instance(3);
  const auto res = sparcs_solve(inst.problem(), SolverConfig{}, inst.ground_truth());
  EXPECT_LE(relative_error(res.state.estimate, inst.truth()), 1e-3);
}

TEST(Alps, JointRecoveryGaussianOperator) {
  const auto inst = joint_gaussian_instance(3);
  const auto res = alps_solve(inst.problem(), SolverConfig{}, inst.ground_truth());
  EXPECT_LE(relative_error(res.state.low_rank, inst.low_rank), 1e-3);
  EXPECT_LE(relative_error(res.state.sparse, inst.sparse), 1e-3);
}

Matrix pure_sparse_truth() {
  Matrix sparse = Matrix::Zero(8, 9);
  sparse(0, 3) = 4.0;
  sparse(2, 2) = -3.0;
  sparse(5, 8) = 2.5;
  sparse(7, 0) = -1.5;
  return sparse;
}

// With L* = 0 the sparse phase of the first iteration sees the whole residual y and the
// s-sparse support of the gradient is exactly supp(M*). Because each least-squares step
// freezes the other component at its previous value, the low-rank phase absorbs the
// largest spike at the same time, and later iterates alternate with period two.
TEST(Sparcs, PureSparseIdentityFirstIterationHitsTruth) {
  const Matrix sparse = pure_sparse_truth();
  const auto op = make_identity_operator(8, 9);
  const ProblemSpec problem{op, op.apply(sparse), 1, 4};
  SolverConfig cfg;
  cfg.max_iterations = 20;
  std::vector<Matrix> estimates;
  Matrix first_sparse;
  cfg.observer = [&](int it, const SolverState& st) {
    if (it == 1) first_sparse = st.sparse;
    estimates.push_back(st.estimate);
  };
  const auto res = sparcs_solve(problem, cfg);
  EXPECT_EQ(first_sparse, sparse);
  EXPECT_FALSE(res.trace.converged);
  ASSERT_EQ(estimates.size(), 20u);
  EXPECT_LE((estimates[19] - estimates[17]).norm(), 1e-9);
  EXPECT_GT((estimates[19] - estimates[18]).norm(), 1.0);
}

TEST(Alps, PureSparseIdentityRecovers) {
  const Matrix sparse = pure_sparse_truth();
  const auto op = make_identity_operator(8, 9);
  const auto res = alps_solve(ProblemSpec{op, op.apply(sparse), 1, 4}, SolverConfig{});
  EXPECT_TRUE(res.trace.converged);
  EXPECT_LE((res.state.estimate - sparse).norm(), 1e-3 * sparse.norm());
}

TEST(Alps, ZeroMomentumIsMemoryless) {
  const auto inst = joint_gaussian_instance(4);
  SolverConfig cfg;
  cfg.momentum = 0.0;
  int calls = 0;
  cfg.observer = [&](int, const SolverState& st) {
    ++calls;
    EXPECT_EQ(st.momentum_low_rank, st.low_rank);
    EXPECT_EQ(st.momentum_sparse, st.sparse);
  };
  const auto res = alps_solve(inst.problem(), cfg);
  EXPECT_EQ(calls, res.trace.iterations());
}

TEST(Alps, MomentumExtrapolates) {
  const auto inst = completion_instance(30, 30, 2, 5);
  SolverConfig cfg;
  cfg.momentum = 0.25;
  cfg.max_iterations = 5;
  cfg.observer = [&](int, const SolverState& st) {
    const Matrix expected = st.low_rank + 0.25 * (st.low_rank - st.previous_low_rank);
    EXPECT_LE((st.momentum_low_rank - expected).norm(), 1e-14 * (1.0 + expected.norm()));
  };
  alps_solve(inst.problem(), cfg);
}

TEST(Alps, IterateRankAndSparsityBudgets) {
  const auto inst = joint_gaussian_instance(6);
  SolverConfig cfg;
  cfg.max_iterations = 10;
  cfg.observer = [&](int, const SolverState& st) {
    EXPECT_LE(st.low_rank_basis.rank(), 2);
    EXPECT_EQ(st.sparse_support.size(), 12);
    EXPECT_LE((st.sparse.array() != 0.0).count(), 12);
    EXPECT_LE(testing::singular_values_via_gram(st.low_rank)(2), 1e-8 * (1.0 + st.low_rank.norm()));
  };
  alps_solve(inst.problem(), cfg);
}

TEST(Trace, RecordsAndCsvSchema) {
  const auto inst = joint_gaussian_instance(7);
  SolverConfig cfg;
  cfg.max_iterations = 4;
  const auto sp = sparcs_solve(inst.problem(), cfg, inst.ground_truth());
  ASSERT_EQ(sp.trace.iterations(), 4);
  EXPECT_FALSE(sp.trace.converged);
  for (const auto& r : sp.trace.records) {
    EXPECT_FALSE(r.mu_low_rank.has_value());
    EXPECT_TRUE(r.err_low_rank.has_value());
  }
  const auto al = alps_solve(inst.problem(), cfg);
  for (const auto& r : al.trace.records) {
    EXPECT_TRUE(r.mu_low_rank.has_value());
    EXPECT_TRUE(r.mu_sparse.has_value());
    EXPECT_FALSE(r.err_low_rank.has_value());
  }
  std::ostringstream csv;
  sp.trace.write_csv(csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis");
  std::string first;
  std::getline(lines, first);
  EXPECT_EQ(first.rfind("1,", 0), 0u);
  EXPECT_NE(first.find(",,,"), std::string::npos);  // empty step-size cells
}

TEST(Solvers, RejectMalformedProblems) {
  const auto op = make_identity_operator(4, 4);
  const Vector y = Vector::Zero(16);
  EXPECT_THROW(alps_solve(ProblemSpec{op, y, 0, 0}, SolverConfig{}), ArgumentError);
  EXPECT_THROW(alps_solve(ProblemSpec{op, y, 5, 0}, SolverConfig{}), ArgumentError);
  EXPECT_THROW(sparcs_solve(ProblemSpec{op, y, 1, 17}, SolverConfig{}), ArgumentError);
  EXPECT_THROW(sparcs_solve(ProblemSpec{op, Vector::Zero(3), 1, 0}, SolverConfig{}), ArgumentError);
  SolverConfig bad;
  bad.momentum = 1.0;
  EXPECT_THROW(alps_solve(ProblemSpec{op, y, 1, 0}, bad), ArgumentError);
}

TEST(Solvers, OverflowIsAHardFailure) {
  const auto op = make_identity_operator(3, 3);
  const Vector y = Vector::Constant(9, 1e308);
  EXPECT_THROW(alps_solve(ProblemSpec{op, y, 1, 1}, SolverConfig{}), SolverFailure);
  EXPECT_THROW(sparcs_solve(ProblemSpec{op, y, 1, 1}, SolverConfig{}), SolverFailure);
}

TEST(Solvers, ZeroObservationsConvergeImmediately) {
  const auto op = make_mask_operator(10, 10, 0.5, 1);
  const ProblemSpec problem{op, Vector::Zero(op.output_dim()), 2, 3};
  for (const auto& res : {alps_solve(problem, SolverConfig{}), sparcs_solve(problem, SolverConfig{})}) {
    EXPECT_TRUE(res.trace.converged);
    EXPECT_EQ(res.trace.iterations(), 1);
    EXPECT_EQ(res.state.estimate, Matrix::Zero(10, 10));
  }
}

TEST(Solvers, RandomizedProjectorRecovers) {
  const auto inst = completion_instance(40, 50, 2, 8);
  SolverConfig cfg;
  cfg.projector.kind = ProjectorKind::randomized;
  cfg.projector.seed = 99;
  const auto a = alps_solve(inst.problem(), cfg);
  const auto b = alps_solve(inst.problem(), cfg);
  EXPECT_LE(relative_error(a.state.estimate, inst.truth()), 1e-3);
  EXPECT_EQ(a.state.estimate, b.state.estimate);
}

TEST(Solvers, NoisyRecoveryDegradesGracefully) {
  InstanceParams p;
  p.rows = 40;
  p.cols = 50;
  p.rank = 2;
  p.model = ObservationModel::mask(0.5);
  p.noise_norm = 1e-2;
  p.seed = 9;
  const auto inst = generate_instance(p);
  const auto res = alps_solve(inst.problem(), SolverConfig{});
  EXPECT_LE(relative_error(res.state.estimate, inst.truth()), 2e-2);
}

}  // namespace
}  // namespace lrsp
