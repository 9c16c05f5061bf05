#include <algorithm>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/matrix_core.hpp"
#include "lrsp/random.hpp"

namespace lrsp {

RankKApprox randomized_rank_k(const Matrix& m, Index k, Index oversample, Index power_iters,
                              std::uint64_t seed) {
  const Index limit = std::min(m.rows(), m.cols());
  if (k < 1 || oversample < 0 || power_iters < 0 || k + oversample > limit) {
    throw ArgumentError("randomized_rank_k: need 1 <= k and k + oversample <= " +
                        std::to_string(limit));
  }
  Rng rng(seed);
  const Matrix sketch = gaussian_matrix(m.cols(), k + oversample, rng);

  // Range of m captured by m * sketch; re-orthonormalized between power iterations.
  SubspaceBasis range = SubspaceBasis::orthonormalize(m * sketch);
  for (Index it = 0; it < power_iters && !range.empty(); ++it) {
    const SubspaceBasis co_range =
        SubspaceBasis::orthonormalize(m.transpose() * range.vectors());
    if (co_range.empty()) break;
    range = SubspaceBasis::orthonormalize(m * co_range.vectors());
  }
  if (range.empty()) return {Matrix::Zero(m.rows(), m.cols()), SubspaceBasis(m.rows())};

  // m ~= Q Q^T m; the best rank-k approximation of the projected matrix is exact
  // within span(Q).
  return project_rank_k_in_span(project_onto_basis(m, range), range, k);
}

}  // namespace lrsp
