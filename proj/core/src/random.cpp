#include "lrsp/random.hpp"

namespace lrsp {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix out(rows, cols);
  for (Index i = 0; i < out.size(); ++i) out.data()[i] = normal(rng);
  return out;
}

Vector gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

}  // namespace lrsp
