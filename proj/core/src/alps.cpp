#include "lrsp/errors.hpp"
#include "solver_detail.hpp"

namespace lrsp {

SolverResult alps_solve(const ProblemSpec& problem, const SolverConfig& config,
                        const std::optional<GroundTruth>& truth) {
  problem.validate();
  config.validate();
  detail::check_truth(problem, truth);

  const auto start = std::chrono::steady_clock::now();
  const MeasurementOperator& op = problem.op;
  const ObservationVector& y = problem.observations;
  const Index k = problem.rank;
  const Index s = problem.sparsity;
  const double tau = config.momentum;

  SolverResult result;
  SolverState& st = result.state;
  st = detail::initial_state(problem);
  SubspaceBasis previous_basis(op.rows());

  for (int it = 0; it < config.max_iterations; ++it) {
    // Low-rank phase. The gradient is taken at the full extrapolated point Q_i while the
    // step is applied to the low-rank extrapolation Q_i^L.
    const Matrix query = st.momentum_low_rank + st.momentum_sparse;
    const Matrix grad = gradient(op, y, query);
    const SubspaceBasis expanded =
        basis_union(detail::gradient_subspace(grad, k, config.projector, it), st.low_rank_basis);
    const double mu_low_rank = step_size(op, grad, expanded);
    Matrix v_low_rank = st.momentum_low_rank;
    if (mu_low_rank > 0.0) v_low_rank -= 0.5 * mu_low_rank * project_onto_basis(grad, expanded);
    detail::require_finite(v_low_rank, "low-rank update", it);

    // Q_i^L also carries L_{i-1}, so the span containing V^L is the expansion plus the
    // previous basis.
    const SubspaceBasis container = basis_union(expanded, previous_basis);
    RankKApprox low = container.empty()
                          ? RankKApprox{Matrix::Zero(op.rows(), op.cols()), SubspaceBasis(op.rows())}
                          : project_rank_k_in_span(v_low_rank, container, k);
    Matrix next_momentum_low_rank = low.approx + tau * (low.approx - st.low_rank);

    // Sparse phase, evaluated at the partially updated point Q^L_{i+1} + Q_i^M.
    Matrix next_sparse = st.sparse;
    SupportSet next_support = st.sparse_support;
    std::optional<double> mu_sparse;
    Matrix next_momentum_sparse = st.momentum_sparse;
    if (s > 0) {
      const Matrix grad_mid = gradient(op, y, next_momentum_low_rank + st.momentum_sparse);
      detail::require_finite(grad_mid, "gradient", it);
      const SupportSet expanded_support =
          support_union(project_sparse_s(grad_mid, s).support, st.sparse_support);
      const double mu = step_size(op, grad_mid, expanded_support);
      mu_sparse = mu;
      Matrix v_sparse = restrict_to_support(st.momentum_sparse, expanded_support);
      if (mu > 0.0) v_sparse -= 0.5 * mu * restrict_to_support(grad_mid, expanded_support);
      detail::require_finite(v_sparse, "sparse update", it);
      SparseApprox proj = project_sparse_s(v_sparse, s);
      next_sparse = std::move(proj.approx);
      next_support = std::move(proj.support);
      next_momentum_sparse = next_sparse + tau * (next_sparse - st.sparse);
    }

    const Matrix previous_estimate = st.estimate;
    previous_basis = std::move(st.low_rank_basis);
    st.previous_low_rank = std::move(st.low_rank);
    st.previous_sparse = std::move(st.sparse);
    st.low_rank = std::move(low.approx);
    st.low_rank_basis = std::move(low.basis);
    st.sparse = std::move(next_sparse);
    st.sparse_support = std::move(next_support);
    st.momentum_low_rank = std::move(next_momentum_low_rank);
    st.momentum_sparse = std::move(next_momentum_sparse);
    st.estimate = st.low_rank + st.sparse;

    const bool done = detail::record_iteration(problem, config, truth, previous_estimate, st,
                                               mu_low_rank, mu_sparse, start, result.trace);
    if (config.observer) config.observer(it + 1, st);
    if (done) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace lrsp
