#include <cmath>
#include <functional>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/solvers.hpp"

namespace lrsp {
namespace {

// Plain CG on a symmetric positive semidefinite operator over row-major coefficient
// blocks (Frobenius inner product). Keeps the best iterate seen.
template <typename ApplyFn>
LeastSquaresResult conjugate_gradient(const ApplyFn& normal_op, const Matrix& rhs, Matrix x,
                                      const CgOptions& cg) {
  LeastSquaresResult out;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.solution = Matrix::Zero(rhs.rows(), rhs.cols());
    out.converged = true;
    return out;
  }
  Matrix r = rhs - normal_op(x);
  double rr = r.squaredNorm();
  double best_res = std::sqrt(rr);
  Matrix best = x;
  Matrix p = r;
  int it = 0;
  const double target = cg.tolerance * rhs_norm;
  while (std::sqrt(rr) > target && it < cg.max_iterations) {
    const Matrix hp = normal_op(p);
    const double curvature = (p.array() * hp.array()).sum();
    if (!(curvature > 0.0)) break;  // direction in the null space of A restricted
    const double alpha = rr / curvature;
    x += alpha * p;
    r -= alpha * hp;
    const double rr_next = r.squaredNorm();
    ++it;
    if (std::sqrt(rr_next) < best_res) {
      best_res = std::sqrt(rr_next);
      best = x;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  out.iterations = it;
  out.relative_residual = best_res / rhs_norm;
  out.converged = best_res <= target;
  out.solution = std::move(best);
  return out;
}

void check_shapes(const MeasurementOperator& op, const ObservationVector& y, const Matrix& fixed) {
  if (y.size() != op.output_dim()) {
    throw ArgumentError("restricted_least_squares: observation length mismatch");
  }
  if (fixed.rows() != op.rows() || fixed.cols() != op.cols()) {
    throw ArgumentError("restricted_least_squares: fixed part shape mismatch");
  }
}

}  // namespace

double step_size(const MeasurementOperator& op, const Matrix& grad, const SubspaceBasis& basis) {
  const Matrix g = project_onto_basis(grad, basis);
  const double num = g.squaredNorm();
  if (num == 0.0) return 0.0;
  const double den = op.apply(g).squaredNorm();
  return den > 0.0 ? num / den : 0.0;
}

double step_size(const MeasurementOperator& op, const Matrix& grad, const SupportSet& support) {
  const Matrix g = restrict_to_support(grad, support);
  const double num = g.squaredNorm();
  if (num == 0.0) return 0.0;
  const double den = op.apply(g).squaredNorm();
  return den > 0.0 ? num / den : 0.0;
}

LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const ObservationVector& y,
                                            const SubspaceBasis& basis, const Matrix& fixed_part,
                                            const CgOptions& cg, const Matrix* warm_start) {
  check_shapes(op, y, fixed_part);
  if (basis.ambient_rows() != op.rows()) {
    throw ArgumentError("restricted_least_squares: basis dimension mismatch");
  }
  if (basis.empty()) throw ArgumentError("restricted_least_squares: empty basis");
  const Matrix& b = basis.vectors();

  // Normal equations in coefficient space: B^T A*A (B W) = B^T A*(y - A F).
  auto normal_op = [&](const Matrix& w) -> Matrix {
    return b.transpose() * op.adjoint(op.apply(b * w));
  };
  const Matrix rhs = b.transpose() * op.adjoint(y - op.apply(fixed_part));
  Matrix w0 = warm_start ? Matrix(b.transpose() * (*warm_start))
                         : Matrix(Matrix::Zero(basis.rank(), op.cols()));
  LeastSquaresResult res = conjugate_gradient(normal_op, rhs, std::move(w0), cg);
  res.solution = b * res.solution;
  return res;
}

LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const ObservationVector& y,
                                            const SupportSet& support, const Matrix& fixed_part,
                                            const CgOptions& cg, const Matrix* warm_start) {
  check_shapes(op, y, fixed_part);
  if (support.rows() != op.rows() || support.cols() != op.cols()) {
    throw ArgumentError("restricted_least_squares: support shape mismatch");
  }
  if (support.empty()) throw ArgumentError("restricted_least_squares: empty support");
  const auto& idx = support.linear();
  const auto n = static_cast<Index>(idx.size());

  auto scatter = [&](const Matrix& v) {
    Matrix full = Matrix::Zero(op.rows(), op.cols());
    for (Index i = 0; i < n; ++i) full.data()[idx[static_cast<std::size_t>(i)]] = v(i, 0);
    return full;
  };
  auto gather = [&](const Matrix& full) {
    Matrix v(n, 1);
    for (Index i = 0; i < n; ++i) v(i, 0) = full.data()[idx[static_cast<std::size_t>(i)]];
    return v;
  };
  auto normal_op = [&](const Matrix& v) -> Matrix {
    return gather(op.adjoint(op.apply(scatter(v))));
  };
  const Matrix rhs = gather(op.adjoint(y - op.apply(fixed_part)));
  Matrix v0 = warm_start ? gather(*warm_start) : Matrix(Matrix::Zero(n, 1));
  LeastSquaresResult res = conjugate_gradient(normal_op, rhs, std::move(v0), cg);
  res.solution = scatter(res.solution);
  return res;
}

}  // namespace lrsp
