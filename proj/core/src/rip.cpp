#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lrsp/analysis.hpp"
#include "lrsp/errors.hpp"
#include "lrsp/random.hpp"

namespace lrsp {
namespace {

void check_trials(int trials) {
  if (trials < 1) throw ArgumentError("RIP estimate needs at least one trial");
}

double deviation(double image_norm_sq, double input_norm_sq) {
  if (input_norm_sq <= 0.0) return 0.0;
  return std::abs(std::sqrt(image_norm_sq / input_norm_sq) - 1.0);
}

// Draws the next position of a uniform random ordering of [0, total) (partial Fisher-Yates).
class SupportSampler {
 public:
  explicit SupportSampler(Index total) : perm_(static_cast<std::size_t>(total)) {
    std::iota(perm_.begin(), perm_.end(), Index{0});
  }
  Index next(Rng& rng) {
    const auto total = static_cast<Index>(perm_.size());
    std::uniform_int_distribution<Index> pick(used_, total - 1);
    std::swap(perm_[static_cast<std::size_t>(used_)], perm_[static_cast<std::size_t>(pick(rng))]);
    return perm_[static_cast<std::size_t>(used_++)];
  }

 private:
  std::vector<Index> perm_;
  Index used_ = 0;
};

}  // namespace

bool rip_violated(double delta) { return delta >= 1.0; }

double estimate_rank_rip(const MeasurementOperator& op, Index k, int trials, std::uint64_t seed) {
  check_trials(trials);
  const Index m = op.rows();
  const Index n = op.cols();
  if (k < 1 || k > std::min(m, n)) {
    throw ArgumentError("estimate_rank_rip: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(std::min(m, n)) + "]");
  }
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix u(m, k);
    Matrix r(n, k);
    ObservationVector image = ObservationVector::Zero(op.output_dim());
    for (Index j = 0; j < k; ++j) {
      u.col(j) = gaussian_vector(m, rng);
      r.col(j) = gaussian_vector(n, rng);
      image += op.apply(u.col(j) * r.col(j).transpose());
      // ||sum_a u_a r_a^T||_F^2 = sum_{a,b} (u_a . u_b)(r_a . r_b)
      const auto uu = u.leftCols(j + 1).transpose() * u.leftCols(j + 1);
      const auto rr = r.leftCols(j + 1).transpose() * r.leftCols(j + 1);
      const double norm_sq = (Matrix(uu).array() * Matrix(rr).array()).sum();
      worst = std::max(worst, deviation(image.squaredNorm(), norm_sq));
    }
  }
  return std::min(worst, 1.0);
}

double estimate_sparse_rip(const MeasurementOperator& op, Index s, int trials, std::uint64_t seed) {
  check_trials(trials);
  const Index total = op.rows() * op.cols();
  if (s < 1 || s > total) {
    throw ArgumentError("estimate_sparse_rip: s=" + std::to_string(s) + " outside [1, " +
                        std::to_string(total) + "]");
  }
  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    SupportSampler sampler(total);
    ObservationVector image = ObservationVector::Zero(op.output_dim());
    double norm_sq = 0.0;
    for (Index j = 0; j < s; ++j) {
      const Index pos = sampler.next(rng);
      const double v = normal(rng);
      op.accumulate_unit(pos, v, image);
      norm_sq += v * v;
      worst = std::max(worst, deviation(image.squaredNorm(), norm_sq));
    }
  }
  return std::min(worst, 1.0);
}

double estimate_cross_rip(const MeasurementOperator& op, Index s, Index k, int trials,
                          std::uint64_t seed) {
  check_trials(trials);
  const Index m = op.rows();
  const Index n = op.cols();
  const Index total = m * n;
  if (k < 1 || k > std::min(m, n)) {
    throw ArgumentError("estimate_cross_rip: k must lie in [1, min(rows, cols)]");
  }
  if (s < 1 || s + k > total) throw ArgumentError("estimate_cross_rip: s out of range");
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const Matrix u = gaussian_matrix(m, k, rng);
    const Matrix r = gaussian_matrix(n, k, rng);
    const Matrix low_rank = u * r.transpose();
    const Matrix leaked = op.adjoint(op.apply(low_rank));
    SupportSampler sampler(total);
    double restricted_sq = 0.0;
    for (Index j = 0; j < s; ++j) {
      const double v = leaked.data()[sampler.next(rng)];
      restricted_sq += v * v;
    }
    worst = std::max(worst, std::sqrt(restricted_sq) / low_rank.norm());
  }
  return worst;
}

double estimate_joint_rip(const MeasurementOperator& op, Index k, Index s, int trials,
                          std::uint64_t seed) {
  check_trials(trials);
  const Index m = op.rows();
  const Index n = op.cols();
  const Index total = m * n;
  if (k < 1 || k > std::min(m, n)) throw ArgumentError("estimate_joint_rip: k out of range");
  if (s < 1 || s > total) throw ArgumentError("estimate_joint_rip: s out of range");
  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix x = gaussian_matrix(m, k, rng) * gaussian_matrix(n, k, rng).transpose();
    x /= x.norm();
    Matrix sparse = Matrix::Zero(m, n);
    SupportSampler sampler(total);
    for (Index j = 0; j < s; ++j) {
      const Index pos = sampler.next(rng);
      sparse.data()[pos] = normal(rng);
    }
    x += sparse / sparse.norm();
    worst = std::max(worst, deviation(op.apply(x).squaredNorm(), x.squaredNorm()));
  }
  return std::min(worst, 1.0);
}

RipProfile estimate_rip_profile(const MeasurementOperator& op, Index k, Index s, int trials,
                                std::uint64_t seed) {
  const Index rank_limit = std::min(op.rows(), op.cols());
  const Index total = op.rows() * op.cols();
  if (k < 1 || s < 1) throw ArgumentError("estimate_rip_profile: k and s must be positive");
  auto rank_order = [&](Index mult) { return std::min(mult * k, rank_limit); };
  auto sparse_order = [&](Index mult) { return std::min(mult * s, total); };

  RipProfile p;
  p.delta_3k = estimate_rank_rip(op, rank_order(3), trials, seed);
  p.delta_4k = estimate_rank_rip(op, rank_order(4), trials, seed);
  p.delta_3s = estimate_sparse_rip(op, sparse_order(3), trials, seed);
  p.delta_4s = estimate_sparse_rip(op, sparse_order(4), trials, seed);
  p.delta_joint_3k3s = estimate_joint_rip(op, rank_order(3), sparse_order(3), trials, seed);
  // A (3k, 3s) test matrix is also a (3k, 4s) one.
  p.delta_joint_3k4s = std::max(
      p.delta_joint_3k3s, estimate_joint_rip(op, rank_order(3), sparse_order(4), trials, seed));
  return p;
}

}  // namespace lrsp
