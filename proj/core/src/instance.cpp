#include "lrsp/instance.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/random.hpp"

namespace lrsp {
namespace {

enum Stream : std::uint64_t { kFactors = 1, kSparse = 2, kOperator = 3, kNoise = 4 };

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001B3ULL;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  void doubles(const double* d, Index n) { bytes(d, static_cast<std::size_t>(n) * sizeof(double)); }
  std::uint64_t digest() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

MeasurementOperator make_operator(const InstanceParams& p) {
  const std::uint64_t seed = mix_seed(p.seed, kOperator);
  switch (p.model.kind) {
    case OperatorKind::mask:
      return make_mask_operator(p.rows, p.cols, p.model.fraction, seed);
    case OperatorKind::gaussian:
      return make_gaussian_operator(p.rows, p.cols, p.model.measurements, seed);
    case OperatorKind::identity:
      return make_identity_operator(p.rows, p.cols);
  }
  throw ArgumentError("unknown observation model");
}

}  // namespace

std::uint64_t SyntheticInstance::fingerprint() const {
  Fnv1a h;
  h.value(params.rows);
  h.value(params.cols);
  h.value(params.rank);
  h.value(params.sparsity);
  h.value(static_cast<int>(op.kind()));
  h.value(op.output_dim());
  if (op.kind() == OperatorKind::mask) {
    for (Index li : op.observed().linear()) h.value(li);
  } else if (op.kind() == OperatorKind::gaussian) {
    h.value(op.seed());
  }
  h.doubles(low_rank.data(), low_rank.size());
  h.doubles(sparse.data(), sparse.size());
  h.doubles(observations.data(), observations.size());
  return h.digest();
}

SyntheticInstance generate_instance(const InstanceParams& params) {
  const Index m = params.rows;
  const Index n = params.cols;
  if (m < 1 || n < 1) throw ArgumentError("generate_instance: empty shape");
  if (params.rank < 1 || params.rank > std::min(m, n)) {
    throw ArgumentError("generate_instance: rank " + std::to_string(params.rank) +
                        " infeasible for " + std::to_string(m) + "x" + std::to_string(n));
  }
  if (params.sparsity < 0 || params.sparsity > m * n) {
    throw ArgumentError("generate_instance: sparsity " + std::to_string(params.sparsity) +
                        " infeasible for " + std::to_string(m) + "x" + std::to_string(n));
  }
  if (!(params.noise_norm >= 0.0)) throw ArgumentError("generate_instance: negative noise norm");
  if (!(params.sparse_scale > 0.0)) throw ArgumentError("generate_instance: sparse scale must be positive");

  SyntheticInstance inst;
  inst.params = params;

  Rng factor_rng(mix_seed(params.seed, kFactors));
  const Matrix u = gaussian_matrix(m, params.rank, factor_rng);
  const Matrix r = gaussian_matrix(n, params.rank, factor_rng);
  inst.low_rank = u * r.transpose();

  inst.sparse = Matrix::Zero(m, n);
  if (params.sparsity > 0) {
    Rng sparse_rng(mix_seed(params.seed, kSparse));
    const Index total = m * n;
    std::vector<Index> perm(static_cast<std::size_t>(total));
    std::iota(perm.begin(), perm.end(), Index{0});
    const double reference = params.sparse_reference == SparseScaleReference::max
                                 ? inst.low_rank.cwiseAbs().maxCoeff()
                                 : inst.low_rank.norm() / std::sqrt(static_cast<double>(total));
    const double magnitude = params.sparse_scale * reference;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < params.sparsity; ++i) {
      std::uniform_int_distribution<Index> pick(i, total - 1);
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(sparse_rng))]);
      double v = 0.0;
      while (v == 0.0) v = normal(sparse_rng);
      inst.sparse.data()[perm[static_cast<std::size_t>(i)]] = magnitude * v;
    }
  }

  const double scale = (inst.low_rank + inst.sparse).norm();
  inst.low_rank /= scale;
  inst.sparse /= scale;

  inst.op = make_operator(params);

  Rng noise_rng(mix_seed(params.seed, kNoise));
  inst.noise = Vector::Zero(inst.op.output_dim());
  if (params.noise_norm > 0.0) {
    Vector dir = gaussian_vector(inst.op.output_dim(), noise_rng);
    inst.noise = params.noise_norm * dir / dir.norm();
  }
  inst.observations = inst.op.apply(inst.truth()) + inst.noise;
  return inst;
}

double relative_error(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw ArgumentError("relative_error: shape mismatch");
  }
  const double denom = truth.norm();
  if (denom == 0.0) throw ArgumentError("relative_error: zero reference matrix");
  return (estimate - truth).norm() / denom;
}

}  // namespace lrsp
