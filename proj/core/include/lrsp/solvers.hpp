#pragma once

// Recovery of X* = L* + M* (rank <= k, at most s nonzeros) from y = A X* + e.
//
// sparcs_solve - greedy subspace/support expansion followed by restricted least squares
//                on each component (alternating, the other component held at its
//                previous value).
// alps_solve   - projected gradient steps on the expanded sets with exact line search and
//                constant momentum tau on both components.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrsp/matrix_core.hpp"
#include "lrsp/measurement.hpp"

namespace lrsp {

struct ProblemSpec {
  MeasurementOperator op;
  ObservationVector observations;
  Index rank = 1;      // k >= 1
  Index sparsity = 0;  // s; 0 disables the sparse component entirely

  /// Throws ArgumentError unless budgets and observation length fit the operator.
  void validate() const;
};

enum class ProjectorKind { exact, randomized };

/// How the best rank-k subspace of full-size gradients is computed.
struct RankProjector {
  ProjectorKind kind = ProjectorKind::exact;
  std::uint64_t seed = 0;
  Index oversample = 5;
  Index power_iters = 2;
};

struct SolverState;

struct SolverConfig {
  double tolerance = 1e-4;  // eta
  int max_iterations = 700;
  double momentum = 0.25;  // tau, ALPS only
  double cg_tolerance = 1e-8;
  int cg_max_iterations = 200;
  RankProjector projector;
  /// Called after every iteration with the 1-based iteration count. Test and diagnostics hook.
  std::function<void(int, const SolverState&)> observer;

  void validate() const;
};

struct GroundTruth {
  Matrix low_rank;
  Matrix sparse;
};

struct SolverState {
  Matrix low_rank;  // L_i
  Matrix sparse;    // M_i
  Matrix estimate;  // X_i = L_i + M_i
  SubspaceBasis low_rank_basis;
  SupportSet sparse_support;

  // Momentum bookkeeping (ALPS). Equal to low_rank/sparse when tau = 0.
  Matrix momentum_low_rank;  // Q_i^L
  Matrix momentum_sparse;    // Q_i^M
  Matrix previous_low_rank;
  Matrix previous_sparse;
};

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;    // ||y - A X_i||_2
  double rel_change = 0.0;  // ||X_i - X_{i-1}||_F / ||X_i||_F
  std::optional<double> mu_low_rank;
  std::optional<double> mu_sparse;
  std::optional<double> err_low_rank;  // ||L_i - L*||_F, only with ground truth
  std::optional<double> err_sparse;
  double millis = 0.0;  // wall time since the solve started
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;
  bool converged = false;  // stopping rule met (as opposed to hitting max_iterations)

  int iterations() const noexcept { return static_cast<int>(records.size()); }

  /// `iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis`; absent values are empty cells.
  void write_csv(std::ostream& out) const;
};

struct SolverResult {
  SolverState state;
  SolverTrace trace;
};

SolverResult sparcs_solve(const ProblemSpec& problem, const SolverConfig& config,
                          const std::optional<GroundTruth>& truth = std::nullopt);

SolverResult alps_solve(const ProblemSpec& problem, const SolverConfig& config,
                        const std::optional<GroundTruth>& truth = std::nullopt);

/// Exact line-search step ||g||^2 / ||A g||^2 for g = grad restricted to the subspace.
/// Returns 0 when the restricted gradient (or its image) vanishes.
double step_size(const MeasurementOperator& op, const Matrix& grad, const SubspaceBasis& basis);
double step_size(const MeasurementOperator& op, const Matrix& grad, const SupportSet& support);

struct CgOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

struct LeastSquaresResult {
  Matrix solution;
  int iterations = 0;
  double relative_residual = 0.0;  // ||normal-equation residual|| / ||rhs||
  bool converged = false;
};

/// argmin over V in span(basis) of ||y - A(V + fixed_part)||^2, by CG on the normal
/// equations in basis coordinates (V = B W). `warm_start`, if given, must lie in span(basis).
LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const ObservationVector& y,
                                            const SubspaceBasis& basis, const Matrix& fixed_part,
                                            const CgOptions& cg,
                                            const Matrix* warm_start = nullptr);

/// Same objective with V supported on `support`.
LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const ObservationVector& y,
                                            const SupportSet& support, const Matrix& fixed_part,
                                            const CgOptions& cg,
                                            const Matrix* warm_start = nullptr);

}  // namespace lrsp
