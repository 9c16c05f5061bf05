#pragma once

#include <chrono>
#include <optional>

#include "lrsp/solvers.hpp"

namespace lrsp::detail {

/// Basis of the best rank-k column space of a full-size gradient (exact or randomized).
SubspaceBasis gradient_subspace(const Matrix& grad, Index k, const RankProjector& projector,
                                int iteration);

/// Throws SolverFailure naming `what` if x holds NaN or Inf.
void require_finite(const Matrix& x, const char* what, int iteration);

/// Fresh zero state for the problem's ambient shape.
SolverState initial_state(const ProblemSpec& problem);

void check_truth(const ProblemSpec& problem, const std::optional<GroundTruth>& truth);

/// Builds the trace record for the just-finished iteration and throws SolverFailure on
/// non-finite iterates. Returns true when the stopping rule is met.
bool record_iteration(const ProblemSpec& problem, const SolverConfig& config,
                      const std::optional<GroundTruth>& truth, const Matrix& previous_estimate,
                      const SolverState& state, std::optional<double> mu_low_rank,
                      std::optional<double> mu_sparse,
                      std::chrono::steady_clock::time_point start, SolverTrace& trace);

}  // namespace lrsp::detail
