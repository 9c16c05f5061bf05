#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/random.hpp"
#include "solver_detail.hpp"

namespace lrsp {

void ProblemSpec::validate() const {
  const Index limit = std::min(op.rows(), op.cols());
  if (rank < 1 || rank > limit) {
    throw ArgumentError("rank budget k=" + std::to_string(rank) + " outside [1, " +
                        std::to_string(limit) + "]");
  }
  if (sparsity < 0 || sparsity > op.rows() * op.cols()) {
    throw ArgumentError("sparsity budget s=" + std::to_string(sparsity) + " outside [0, " +
                        std::to_string(op.rows() * op.cols()) + "]");
  }
  if (observations.size() != op.output_dim()) {
    throw ArgumentError("observation vector has length " + std::to_string(observations.size()) +
                        ", operator produces " + std::to_string(op.output_dim()));
  }
  if (!observations.allFinite()) throw ArgumentError("observations contain NaN or Inf");
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  if (max_iterations < 1) throw ArgumentError("max_iterations must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ArgumentError("momentum must lie in [0, 1)");
  if (!(cg_tolerance > 0.0)) throw ArgumentError("cg_tolerance must be positive");
  if (cg_max_iterations < 1) throw ArgumentError("cg_max_iterations must be positive");
  if (projector.oversample < 0 || projector.power_iters < 0) {
    throw ArgumentError("randomized projector parameters must be nonnegative");
  }
}

void SolverTrace::write_csv(std::ostream& out) const {
  auto cell = [&out](const std::optional<double>& v) {
    if (v) out << *v;
  };
  const auto old_precision = out.precision(17);
  out << "iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.residual << ',' << r.rel_change << ',';
    cell(r.mu_low_rank);
    out << ',';
    cell(r.mu_sparse);
    out << ',';
    cell(r.err_low_rank);
    out << ',';
    cell(r.err_sparse);
    out << ',' << r.millis << '\n';
  }
  out.precision(old_precision);
}

namespace detail {

void require_finite(const Matrix& x, const char* what, int iteration) {
  if (!x.allFinite()) {
    throw SolverFailure(std::string("non-finite ") + what + " at iteration " +
                        std::to_string(iteration + 1));
  }
}

SubspaceBasis gradient_subspace(const Matrix& grad, Index k, const RankProjector& projector,
                                int iteration) {
  require_finite(grad, "gradient", iteration);
  const Index limit = std::min(grad.rows(), grad.cols());
  if (projector.kind == ProjectorKind::randomized) {
    const Index oversample = std::min(projector.oversample, limit - k);
    return randomized_rank_k(grad, k, oversample, projector.power_iters,
                             mix_seed(projector.seed, static_cast<std::uint64_t>(iteration)))
        .basis;
  }
  return project_rank_k(grad, k).basis;
}

SolverState initial_state(const ProblemSpec& problem) {
  const Index m = problem.op.rows();
  const Index n = problem.op.cols();
  SolverState s;
  s.low_rank = Matrix::Zero(m, n);
  s.sparse = Matrix::Zero(m, n);
  s.estimate = Matrix::Zero(m, n);
  s.low_rank_basis = SubspaceBasis(m);
  s.sparse_support = SupportSet(m, n);
  s.momentum_low_rank = Matrix::Zero(m, n);
  s.momentum_sparse = Matrix::Zero(m, n);
  s.previous_low_rank = Matrix::Zero(m, n);
  s.previous_sparse = Matrix::Zero(m, n);
  return s;
}

void check_truth(const ProblemSpec& problem, const std::optional<GroundTruth>& truth) {
  if (!truth) return;
  auto bad = [&](const Matrix& x) {
    return x.rows() != problem.op.rows() || x.cols() != problem.op.cols();
  };
  if (bad(truth->low_rank) || bad(truth->sparse)) {
    throw ArgumentError("ground truth shape does not match the operator");
  }
}

bool record_iteration(const ProblemSpec& problem, const SolverConfig& config,
                      const std::optional<GroundTruth>& truth, const Matrix& previous_estimate,
                      const SolverState& state, std::optional<double> mu_low_rank,
                      std::optional<double> mu_sparse,
                      std::chrono::steady_clock::time_point start, SolverTrace& trace) {
  IterationRecord rec;
  rec.iteration = trace.iterations() + 1;
  if (!state.estimate.allFinite()) {
    throw SolverFailure("non-finite iterate at iteration " + std::to_string(rec.iteration) +
                        (state.low_rank.allFinite() ? " (sparse component)" : " (low-rank component)"));
  }
  rec.residual = (problem.observations - problem.op.apply(state.estimate)).norm();
  const double change = (state.estimate - previous_estimate).norm();
  const double size = state.estimate.norm();
  if (size > 0.0) {
    rec.rel_change = change / size;
  } else {
    rec.rel_change = change == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  rec.mu_low_rank = mu_low_rank;
  rec.mu_sparse = mu_sparse;
  if (truth) {
    rec.err_low_rank = (state.low_rank - truth->low_rank).norm();
    rec.err_sparse = (state.sparse - truth->sparse).norm();
  }
  rec.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  trace.records.push_back(rec);
  return rec.rel_change <= config.tolerance;
}

}  // namespace detail
}  // namespace lrsp
