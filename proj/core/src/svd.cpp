#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/matrix_core.hpp"

namespace lrsp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 80;

struct JacobiResult {
  Matrix left;  // m x n, orthonormal columns where sigma > 0
  Vector sigma;
  Matrix right;  // n x n orthogonal
};

// Hestenes one-sided Jacobi on an m x n matrix with m >= n. The n columns are held
// as the rows of `w` so every rotation touches two contiguous rows.
JacobiResult one_sided_jacobi(const Matrix& a, double tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix w = a.transpose();
  Matrix vt = Matrix::Identity(n, n);
  Vector sq(n);

  bool converged = false;
  double off = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Index j = 0; j < n; ++j) sq[j] = w.row(j).squaredNorm();
    // Columns whose energy is below rounding level of the whole matrix are treated as zero;
    // rotating them only amplifies cancellation error.
    const double negligible = sq.sum() * kEps * kEps;
    converged = true;
    off = 0.0;
    for (Index i = 0; i + 1 < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double alpha = sq[i];
        const double beta = sq[j];
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = w.row(i).dot(w.row(j));
        const double scale = std::sqrt(alpha * beta);
        const double rel = std::abs(gamma) / scale;
        off = std::max(off, rel);
        if (rel <= tol) continue;
        converged = false;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        double* wi = w.row(i).data();
        double* wj = w.row(j).data();
        for (Index r = 0; r < m; ++r) {
          const double x = wi[r];
          const double y = wj[r];
          wi[r] = c * x - s * y;
          wj[r] = s * x + c * y;
        }
        double* vi = vt.row(i).data();
        double* vj = vt.row(j).data();
        for (Index r = 0; r < n; ++r) {
          const double x = vi[r];
          const double y = vj[r];
          vi[r] = c * x - s * y;
          vj[r] = s * x + c * y;
        }
        sq[i] = std::max(alpha - t * gamma, 0.0);
        sq[j] = std::max(beta + t * gamma, 0.0);
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("svd: Jacobi sweeps did not converge, max relative off-orthogonality " +
                               std::to_string(off),
                           off);
  }

  JacobiResult out;
  out.sigma.resize(n);
  for (Index j = 0; j < n; ++j) out.sigma[j] = w.row(j).norm();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return out.sigma[x] > out.sigma[y]; });

  out.left.resize(m, n);
  out.right.resize(n, n);
  Vector sorted(n);
  for (Index c = 0; c < n; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    sorted[c] = out.sigma[src];
    out.right.col(c) = vt.row(src).transpose();
    if (sorted[c] > 0.0) {
      out.left.col(c) = w.row(src).transpose() / sorted[c];
    } else {
      out.left.col(c).setZero();
    }
  }
  out.sigma = sorted;
  return out;
}

// Replaces left vectors attached to negligible singular values with an orthonormal
// completion so the block stays orthonormal for rank-deficient input.
void complete_left_vectors(Matrix& left, const Vector& sigma) {
  const Index m = left.rows();
  const Index n = left.cols();
  const double smax = n > 0 ? sigma[0] : 0.0;
  const double cutoff = smax * static_cast<double>(std::max(m, n)) *
                        std::numeric_limits<double>::epsilon();
  Index good = 0;
  while (good < n && sigma[good] > cutoff && sigma[good] > 0.0) ++good;
  for (Index c = good; c < n; ++c) {
    Vector best;
    double best_norm = -1.0;
    for (Index e = 0; e < m; ++e) {
      Vector cand = Vector::Unit(m, e);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index p = 0; p < c; ++p) cand -= left.col(p).dot(cand) * left.col(p);
      }
      const double nrm = cand.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(cand);
      }
      if (best_norm > 0.7) break;
    }
    left.col(c) = best / best_norm;
  }
}

SvdFactors svd_tall(const Matrix& a, double tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  SvdFactors f;
  if (n == 0) {
    f.left.resize(m, 0);
    f.right.resize(0, 0);
    return f;
  }
  if (m > n + n / 4) {
    // A = QR, SVD(R) = U_R S V^T, U = Q U_R. Shrinks the vectors Jacobi rotates and
    // speeds up convergence.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
    JacobiResult j = one_sided_jacobi(r, tol);
    complete_left_vectors(j.left, j.sigma);
    f.left = q * j.left;
    f.singular_values = std::move(j.sigma);
    f.right = std::move(j.right);
  } else {
    JacobiResult j = one_sided_jacobi(a, tol);
    complete_left_vectors(j.left, j.sigma);
    f.left = std::move(j.left);
    f.singular_values = std::move(j.sigma);
    f.right = std::move(j.right);
  }
  return f;
}

}  // namespace

Matrix SvdFactors::reconstruct() const {
  return left * singular_values.asDiagonal() * right.transpose();
}

SvdFactors svd(const Matrix& m, double tol) {
  if (!all_finite(m)) throw ArgumentError("svd: input contains NaN or Inf");
  if (!(tol > 0.0)) throw ArgumentError("svd: tolerance must be positive");
  if (m.rows() >= m.cols()) return svd_tall(m, tol);
  SvdFactors t = svd_tall(m.transpose(), tol);
  std::swap(t.left, t.right);
  return t;
}

}  // namespace lrsp
