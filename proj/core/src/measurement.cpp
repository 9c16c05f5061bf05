#include "lrsp/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "lrsp/errors.hpp"
#include "lrsp/random.hpp"

namespace lrsp {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::mask:
      return "mask";
    case OperatorKind::gaussian:
      return "gaussian";
    case OperatorKind::identity:
      return "identity";
  }
  return "unknown";
}

MeasurementOperator MeasurementOperator::identity(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw ArgumentError("identity operator: empty shape");
  return MeasurementOperator(OperatorKind::identity, rows, cols, rows * cols);
}

MeasurementOperator MeasurementOperator::mask(SupportSet observed) {
  if (observed.rows() < 1 || observed.cols() < 1) {
    throw ArgumentError("mask operator: empty shape");
  }
  if (observed.empty()) throw ArgumentError("mask operator: empty observed set");
  MeasurementOperator op(OperatorKind::mask, observed.rows(), observed.cols(), observed.size());
  op.observed_ = std::move(observed);
  return op;
}

MeasurementOperator MeasurementOperator::gaussian(Index rows, Index cols, Index p,
                                                  std::uint64_t seed, Index max_coefficients) {
  if (rows < 1 || cols < 1) throw ArgumentError("gaussian operator: empty shape");
  if (p < 1) throw ArgumentError("gaussian operator: p must be positive");
  const double count = static_cast<double>(p) * static_cast<double>(rows * cols);
  if (count > static_cast<double>(max_coefficients)) {
    throw ArgumentError("gaussian operator: " + std::to_string(p) + " x " +
                        std::to_string(rows * cols) + " coefficients exceed the cap of " +
                        std::to_string(max_coefficients));
  }
  MeasurementOperator op(OperatorKind::gaussian, rows, cols, p);
  op.seed_ = seed;
  Rng rng(seed);
  op.coeffs_ = gaussian_matrix(p, rows * cols, rng, 1.0 / std::sqrt(static_cast<double>(p)));
  return op;
}

const SupportSet& MeasurementOperator::observed() const {
  if (kind_ != OperatorKind::mask) throw ArgumentError("observed(): not a mask operator");
  return observed_;
}

std::uint64_t MeasurementOperator::seed() const {
  if (kind_ != OperatorKind::gaussian) throw ArgumentError("seed(): not a gaussian operator");
  return seed_;
}

const Matrix& MeasurementOperator::coefficients() const {
  if (kind_ != OperatorKind::gaussian) {
    throw ArgumentError("coefficients(): not a gaussian operator");
  }
  return coeffs_;
}

MeasurementOperator MeasurementOperator::scaled(double factor) const {
  MeasurementOperator copy = *this;
  copy.gain_ *= factor;
  return copy;
}

double MeasurementOperator::cost_hint() const noexcept {
  switch (kind_) {
    case OperatorKind::mask:
      return static_cast<double>(output_dim_);
    case OperatorKind::identity:
      return static_cast<double>(rows_ * cols_);
    case OperatorKind::gaussian:
      return 2.0 * static_cast<double>(output_dim_) * static_cast<double>(rows_ * cols_);
  }
  return 0.0;
}

void MeasurementOperator::check_input(const Matrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw ArgumentError("measurement operator expects " + std::to_string(rows_) + "x" +
                        std::to_string(cols_) + " input, got " + std::to_string(x.rows()) +
                        "x" + std::to_string(x.cols()));
  }
}

ObservationVector MeasurementOperator::apply(const Matrix& x) const {
  check_input(x);
  const Eigen::Map<const Vector> vec(x.data(), x.size());
  ObservationVector y;
  switch (kind_) {
    case OperatorKind::identity:
      y = vec;
      break;
    case OperatorKind::mask: {
      y.resize(output_dim_);
      const auto& omega = observed_.linear();
      for (std::size_t i = 0; i < omega.size(); ++i) y[static_cast<Index>(i)] = x.data()[omega[i]];
      break;
    }
    case OperatorKind::gaussian:
      y = coeffs_ * vec;
      break;
  }
  if (gain_ != 1.0) y *= gain_;
  return y;
}

Matrix MeasurementOperator::adjoint(const ObservationVector& y) const {
  if (y.size() != output_dim_) {
    throw ArgumentError("adjoint: observation length " + std::to_string(y.size()) +
                        " does not match output dimension " + std::to_string(output_dim_));
  }
  Matrix out(rows_, cols_);
  Eigen::Map<Vector> vec(out.data(), out.size());
  switch (kind_) {
    case OperatorKind::identity:
      vec = y;
      break;
    case OperatorKind::mask: {
      out.setZero();
      const auto& omega = observed_.linear();
      for (std::size_t i = 0; i < omega.size(); ++i) out.data()[omega[i]] = y[static_cast<Index>(i)];
      break;
    }
    case OperatorKind::gaussian:
      vec.noalias() = coeffs_.transpose() * y;
      break;
  }
  if (gain_ != 1.0) out *= gain_;
  return out;
}

void MeasurementOperator::accumulate_unit(Index linear, double scale, ObservationVector& y) const {
  if (linear < 0 || linear >= rows_ * cols_) throw ArgumentError("accumulate_unit: bad index");
  if (y.size() != output_dim_) throw ArgumentError("accumulate_unit: bad output length");
  const double s = scale * gain_;
  switch (kind_) {
    case OperatorKind::identity:
      y[linear] += s;
      break;
    case OperatorKind::mask: {
      const auto& omega = observed_.linear();
      const auto it = std::lower_bound(omega.begin(), omega.end(), linear);
      if (it != omega.end() && *it == linear) y[it - omega.begin()] += s;
      break;
    }
    case OperatorKind::gaussian:
      y += s * coeffs_.col(linear);
      break;
  }
}

ObservationVector apply(const MeasurementOperator& op, const Matrix& x) { return op.apply(x); }

Matrix adjoint(const MeasurementOperator& op, const ObservationVector& y) {
  return op.adjoint(y);
}

Matrix gradient(const MeasurementOperator& op, const ObservationVector& y, const Matrix& x) {
  if (y.size() != op.output_dim()) throw ArgumentError("gradient: observation length mismatch");
  return -2.0 * op.adjoint(y - op.apply(x));
}

MeasurementOperator make_identity_operator(Index rows, Index cols) {
  return MeasurementOperator::identity(rows, cols);
}

MeasurementOperator make_mask_operator(Index rows, Index cols, double fraction,
                                       std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ArgumentError("make_mask_operator: empty shape");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("make_mask_operator: fraction must lie in (0, 1]");
  }
  const Index total = rows * cols;
  const auto count = static_cast<Index>(std::llround(fraction * static_cast<double>(total)));
  if (count < 1) throw ArgumentError("make_mask_operator: fraction selects no entries");

  // Partial Fisher-Yates: the first `count` slots are a uniform sample without replacement.
  std::vector<Index> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  perm.resize(static_cast<std::size_t>(count));
  return MeasurementOperator::mask(SupportSet::from_linear(rows, cols, std::move(perm)));
}

MeasurementOperator make_gaussian_operator(Index rows, Index cols, Index p, std::uint64_t seed,
                                           Index max_coefficients) {
  return MeasurementOperator::gaussian(rows, cols, p, seed, max_coefficients);
}

void write_mask_csv(const std::filesystem::path& path, const SupportSet& observed) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  for (Index i = 0; i < observed.size(); ++i) {
    const auto [r, c] = observed.entry(i);
    out << r << ',' << c << '\n';
  }
}

SupportSet read_mask_csv(const std::filesystem::path& path, Index rows, Index cols) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::pair<Index, Index>> entries;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    long long r = -1;
    long long c = -1;
    char comma = 0;
    if (!(ss >> r >> comma >> c) || comma != ',') {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected `row,col`");
    }
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": index out of range");
    }
    entries.emplace_back(r, c);
  }
  return SupportSet::from_entries(rows, cols, entries);
}

}  // namespace lrsp
