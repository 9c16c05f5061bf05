#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/matrix_core.hpp"

namespace lrsp {
namespace {

// Appends the columns of `cand` to `accepted` (orthonormal, count `rank`), skipping
// candidates that are numerically inside the current span.
void gram_schmidt_append(Matrix& accepted, Index& rank, const Matrix& cand, double drop_tol) {
  for (Index c = 0; c < cand.cols(); ++c) {
    Vector v = cand.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index p = 0; p < rank; ++p) v -= accepted.col(p).dot(v) * accepted.col(p);
    }
    const double residual = v.norm();
    if (residual < drop_tol * original) continue;
    accepted.col(rank++) = v / residual;
  }
}

// Rank cutoff for turning singular vectors into a basis.
double rank_cutoff(const Vector& sigma, Index rows, Index cols) {
  if (sigma.size() == 0) return 0.0;
  return sigma[0] * static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

RankKApprox truncate(const SvdFactors& f, Index k, Index rows, Index cols) {
  const Index r = std::min<Index>(k, f.size());
  RankKApprox out;
  out.approx = f.left.leftCols(r) * f.singular_values.head(r).asDiagonal() *
               f.right.leftCols(r).transpose();
  const double cutoff = rank_cutoff(f.singular_values, rows, cols);
  Index keep = 0;
  while (keep < r && f.singular_values[keep] > cutoff && f.singular_values[keep] > 0.0) ++keep;
  out.basis = SubspaceBasis::from_orthonormal(f.left.leftCols(keep), 1e-8);
  return out;
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

// ---------------------------------------------------------------------------
// SubspaceBasis

SubspaceBasis::SubspaceBasis(Index ambient_rows) : vectors_(ambient_rows, 0) {
  if (ambient_rows < 0) throw ArgumentError("SubspaceBasis: negative ambient dimension");
}

SubspaceBasis SubspaceBasis::from_orthonormal(Matrix columns, double tol) {
  if (columns.cols() > columns.rows()) {
    throw ArgumentError("SubspaceBasis: rank exceeds ambient dimension");
  }
  if (columns.cols() > 0) {
    const Matrix gram = columns.transpose() * columns;
    const double dev = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (!(dev <= tol)) {
      throw ArgumentError("SubspaceBasis: columns are not orthonormal (Gram deviation " +
                          std::to_string(dev) + ")");
    }
  }
  return SubspaceBasis(std::move(columns));
}

SubspaceBasis SubspaceBasis::orthonormalize(const Matrix& columns, double drop_tol) {
  Matrix accepted(columns.rows(), std::min(columns.rows(), columns.cols()));
  Index rank = 0;
  gram_schmidt_append(accepted, rank, columns, drop_tol);
  return SubspaceBasis(Matrix(accepted.leftCols(rank)));
}

Matrix SubspaceBasis::projector() const { return vectors_ * vectors_.transpose(); }

// ---------------------------------------------------------------------------
// SupportSet

SupportSet::SupportSet(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ArgumentError("SupportSet: negative shape");
}

SupportSet SupportSet::from_linear(Index rows, Index cols, std::vector<Index> linear) {
  SupportSet s(rows, cols);
  const Index total = rows * cols;
  std::sort(linear.begin(), linear.end());
  linear.erase(std::unique(linear.begin(), linear.end()), linear.end());
  if (!linear.empty() && (linear.front() < 0 || linear.back() >= total)) {
    throw ArgumentError("SupportSet: index outside " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
  s.linear_ = std::move(linear);
  return s;
}

SupportSet SupportSet::from_entries(Index rows, Index cols,
                                    const std::vector<std::pair<Index, Index>>& entries) {
  std::vector<Index> linear;
  linear.reserve(entries.size());
  for (const auto& [r, c] : entries) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ArgumentError("SupportSet: entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") outside shape");
    }
    linear.push_back(r * cols + c);
  }
  return from_linear(rows, cols, std::move(linear));
}

SupportSet SupportSet::full(Index rows, Index cols) {
  std::vector<Index> all(static_cast<std::size_t>(rows * cols));
  std::iota(all.begin(), all.end(), Index{0});
  SupportSet s(rows, cols);
  s.linear_ = std::move(all);
  return s;
}

std::pair<Index, Index> SupportSet::entry(Index i) const {
  const Index li = linear_.at(static_cast<std::size_t>(i));
  return {li / cols_, li % cols_};
}

bool SupportSet::contains(Index row, Index col) const {
  return std::binary_search(linear_.begin(), linear_.end(), row * cols_ + col);
}

SupportSet support_union(const SupportSet& a, const SupportSet& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError("support_union: shape mismatch");
  }
  std::vector<Index> merged;
  merged.reserve(a.linear().size() + b.linear().size());
  std::set_union(a.linear().begin(), a.linear().end(), b.linear().begin(), b.linear().end(),
                 std::back_inserter(merged));
  return SupportSet::from_linear(a.rows(), a.cols(), std::move(merged));
}

// ---------------------------------------------------------------------------
// Projections

RankKApprox project_rank_k(const Matrix& m, Index k) {
  if (k < 1 || k > std::min(m.rows(), m.cols())) {
    throw ArgumentError("project_rank_k: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(std::min(m.rows(), m.cols())) + "]");
  }
  return truncate(svd(m), k, m.rows(), m.cols());
}

RankKApprox project_rank_k_in_span(const Matrix& m, const SubspaceBasis& basis, Index k) {
  if (basis.ambient_rows() != m.rows()) {
    throw ArgumentError("project_rank_k_in_span: basis dimension mismatch");
  }
  if (k < 1) throw ArgumentError("project_rank_k_in_span: k must be positive");
  if (basis.empty()) {
    return {Matrix::Zero(m.rows(), m.cols()), SubspaceBasis(m.rows())};
  }
  // m = B (B^T m); the SVD of the small coefficient block lifts through B.
  const Matrix coeffs = basis.vectors().transpose() * m;
  const SvdFactors small = svd(coeffs);
  SvdFactors lifted{basis.vectors() * small.left, small.singular_values, small.right};
  return truncate(lifted, k, m.rows(), m.cols());
}

SparseApprox project_sparse_s(const Matrix& m, Index s) {
  const Index total = m.size();
  if (s < 1 || s > total) {
    throw ArgumentError("project_sparse_s: s=" + std::to_string(s) + " outside [1, " +
                        std::to_string(total) + "]");
  }
  const double* data = m.data();
  std::vector<Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [data](Index a, Index b) {
    const double fa = std::abs(data[a]);
    const double fb = std::abs(data[b]);
    return fa > fb || (fa == fb && a < b);
  };
  if (s < total) {
    std::nth_element(idx.begin(), idx.begin() + s, idx.end(), before);
    idx.resize(static_cast<std::size_t>(s));
  }
  SparseApprox out;
  out.approx = Matrix::Zero(m.rows(), m.cols());
  for (Index li : idx) out.approx.data()[li] = data[li];
  out.support = SupportSet::from_linear(m.rows(), m.cols(), std::move(idx));
  return out;
}

SubspaceBasis basis_union(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_rows() != b.ambient_rows()) {
    throw ArgumentError("basis_union: ambient dimension mismatch");
  }
  const Index n = a.ambient_rows();
  Matrix accepted(n, std::min(n, a.rank() + b.rank()));
  accepted.leftCols(a.rank()) = a.vectors();
  Index rank = a.rank();
  gram_schmidt_append(accepted, rank, b.vectors(), kDependenceTolerance);
  return SubspaceBasis::from_orthonormal(Matrix(accepted.leftCols(rank)), 1e-8);
}

Matrix project_onto_basis(const Matrix& m, const SubspaceBasis& b) {
  if (b.ambient_rows() != m.rows()) {
    throw ArgumentError("project_onto_basis: basis has ambient dimension " +
                        std::to_string(b.ambient_rows()) + " but matrix has " +
                        std::to_string(m.rows()) + " rows");
  }
  if (b.empty()) return Matrix::Zero(m.rows(), m.cols());
  return b.vectors() * (b.vectors().transpose() * m);
}

Matrix restrict_to_support(const Matrix& m, const SupportSet& s) {
  if (s.rows() != m.rows() || s.cols() != m.cols()) {
    throw ArgumentError("restrict_to_support: support shape does not match matrix");
  }
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index li : s.linear()) out.data()[li] = m.data()[li];
  return out;
}

}  // namespace lrsp
