#include <string>

#include "lrsp/errors.hpp"
#include "solver_detail.hpp"

namespace lrsp {

SolverResult sparcs_solve(const ProblemSpec& problem, const SolverConfig& config,
                          const std::optional<GroundTruth>& truth) {
  problem.validate();
  config.validate();
  detail::check_truth(problem, truth);

  const auto start = std::chrono::steady_clock::now();
  const MeasurementOperator& op = problem.op;
  const ObservationVector& y = problem.observations;
  const Index k = problem.rank;
  const Index s = problem.sparsity;
  const CgOptions cg{config.cg_tolerance, config.cg_max_iterations};

  SolverResult result;
  SolverState& st = result.state;
  st = detail::initial_state(problem);

  for (int it = 0; it < config.max_iterations; ++it) {
    const Matrix grad = gradient(op, y, st.estimate);

    // Low-rank phase: expand with the gradient's principal subspace, solve least squares
    // over the expanded span with the sparse part frozen, then truncate to rank k.
    const SubspaceBasis expanded =
        basis_union(detail::gradient_subspace(grad, k, config.projector, it), st.low_rank_basis);
    Matrix next_low_rank = st.low_rank;
    SubspaceBasis next_basis = st.low_rank_basis;
    if (!expanded.empty()) {
      const LeastSquaresResult ls =
          restricted_least_squares(op, y, expanded, st.sparse, cg, &st.low_rank);
      if (!ls.converged) {
        result.trace.warnings.push_back(
            "iteration " + std::to_string(it + 1) + ": low-rank CG stopped after " +
            std::to_string(ls.iterations) + " steps, relative residual " +
            std::to_string(ls.relative_residual));
      }
      detail::require_finite(ls.solution, "low-rank least-squares solution", it);
      RankKApprox proj = project_rank_k_in_span(ls.solution, expanded, k);
      next_low_rank = std::move(proj.approx);
      next_basis = std::move(proj.basis);
    }

    // Sparse phase: same pattern on supports, with the previous low-rank part frozen.
    Matrix next_sparse = st.sparse;
    SupportSet next_support = st.sparse_support;
    if (s > 0) {
      const SupportSet expanded_support =
          support_union(project_sparse_s(grad, s).support, st.sparse_support);
      const LeastSquaresResult ls =
          restricted_least_squares(op, y, expanded_support, st.low_rank, cg, &st.sparse);
      if (!ls.converged) {
        result.trace.warnings.push_back(
            "iteration " + std::to_string(it + 1) + ": sparse CG stopped after " +
            std::to_string(ls.iterations) + " steps, relative residual " +
            std::to_string(ls.relative_residual));
      }
      detail::require_finite(ls.solution, "sparse least-squares solution", it);
      SparseApprox proj = project_sparse_s(ls.solution, s);
      next_sparse = std::move(proj.approx);
      next_support = std::move(proj.support);
    }

    const Matrix previous_estimate = st.estimate;
    st.previous_low_rank = std::move(st.low_rank);
    st.previous_sparse = std::move(st.sparse);
    st.low_rank = std::move(next_low_rank);
    st.low_rank_basis = std::move(next_basis);
    st.sparse = std::move(next_sparse);
    st.sparse_support = std::move(next_support);
    st.estimate = st.low_rank + st.sparse;
    st.momentum_low_rank = st.low_rank;
    st.momentum_sparse = st.sparse;

    const bool done = detail::record_iteration(problem, config, truth, previous_estimate, st,
                                               std::nullopt, std::nullopt, start, result.trace);
    if (config.observer) config.observer(it + 1, st);
    if (done) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace lrsp
