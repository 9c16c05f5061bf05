#pragma once

// Dense kernels shared by the solvers: SVD, best rank-k / s-sparse projections,
// subspace and support set algebra, randomized low-rank approximation.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lrsp {

using Index = Eigen::Index;
/// Row-major real matrix. Carries X, L, M, gradients and every intermediate iterate.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Default orthogonality threshold for the Jacobi sweeps in svd().
inline constexpr double kSvdTolerance = 1e-14;
/// Residual norm below which a candidate direction is treated as already spanned.
inline constexpr double kDependenceTolerance = 1e-10;

/// Orthonormal basis of a column space (m x r). Stands in for a set of orthonormal
/// rank-1 atoms: projecting X onto the set is B B^T X.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  /// Empty (rank 0) basis in R^ambient_rows.
  explicit SubspaceBasis(Index ambient_rows);

  /// Wraps columns that are already orthonormal. Throws ArgumentError if the Gram
  /// matrix deviates from identity by more than `tol`.
  static SubspaceBasis from_orthonormal(Matrix columns, double tol = 1e-10);

  /// Orthonormalizes `columns` (two passes of modified Gram-Schmidt), dropping
  /// columns whose residual falls below `drop_tol` times their original norm.
  static SubspaceBasis orthonormalize(const Matrix& columns,
                                      double drop_tol = kDependenceTolerance);

  Index ambient_rows() const noexcept { return vectors_.rows(); }
  Index rank() const noexcept { return vectors_.cols(); }
  bool empty() const noexcept { return vectors_.cols() == 0; }
  const Matrix& vectors() const noexcept { return vectors_; }

  /// Dense projector B B^T (ambient x ambient).
  Matrix projector() const;

 private:
  explicit SubspaceBasis(Matrix v) : vectors_(std::move(v)) {}
  Matrix vectors_;
};

/// Sorted, duplicate-free set of matrix positions inside a rows x cols grid.
/// Positions are kept as row-major linear indices, which sort lexicographically by (row, col).
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(Index rows, Index cols);

  static SupportSet from_linear(Index rows, Index cols, std::vector<Index> linear);
  static SupportSet from_entries(Index rows, Index cols,
                                 const std::vector<std::pair<Index, Index>>& entries);
  static SupportSet full(Index rows, Index cols);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return static_cast<Index>(linear_.size()); }
  bool empty() const noexcept { return linear_.empty(); }
  const std::vector<Index>& linear() const noexcept { return linear_; }
  std::pair<Index, Index> entry(Index i) const;
  bool contains(Index row, Index col) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> linear_;
};

/// Thin SVD: left (rows x r), singular values (r, nonincreasing), right (cols x r), r = min(rows, cols).
struct SvdFactors {
  Matrix left;
  Vector singular_values;
  Matrix right;

  Index size() const noexcept { return singular_values.size(); }
  Matrix reconstruct() const;
};

struct RankKApprox {
  Matrix approx;
  SubspaceBasis basis;  // column space of approx; rank may be < k for rank-deficient input
};

struct SparseApprox {
  Matrix approx;
  SupportSet support;  // always exactly s positions
};

/// One-sided (Hestenes) Jacobi SVD with QR preconditioning for tall inputs.
/// `tol` is the relative pairwise orthogonality threshold of the sweeps.
/// Throws ConvergenceError if the sweep cap is hit.
SvdFactors svd(const Matrix& m, double tol = kSvdTolerance);

/// Best rank-k approximation (truncated SVD) and the basis of its column space.
RankKApprox project_rank_k(const Matrix& m, Index k);

/// Best rank-k approximation of a matrix whose columns are known to lie in span(basis).
/// Exact, but only needs an SVD of the r x cols coefficient matrix basis^T m.
RankKApprox project_rank_k_in_span(const Matrix& m, const SubspaceBasis& basis, Index k);

/// Keeps the s largest-magnitude entries. Ties go to the lexicographically smaller index.
SparseApprox project_sparse_s(const Matrix& m, Index s);

SubspaceBasis basis_union(const SubspaceBasis& a, const SubspaceBasis& b);

SupportSet support_union(const SupportSet& a, const SupportSet& b);

/// B B^T m.
Matrix project_onto_basis(const Matrix& m, const SubspaceBasis& b);

Matrix restrict_to_support(const Matrix& m, const SupportSet& s);

/// Randomized range finder (Gaussian sketch, power iterations, small SVD).
/// Deterministic for a fixed seed.
RankKApprox randomized_rank_k(const Matrix& m, Index k, Index oversample = 5,
                              Index power_iters = 2, std::uint64_t seed = 0);

bool all_finite(const Matrix& m);

}  // namespace lrsp
