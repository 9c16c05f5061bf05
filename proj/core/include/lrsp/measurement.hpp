#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "lrsp/matrix_core.hpp"

namespace lrsp {

/// Measurements y in R^p.
using ObservationVector = Vector;

enum class OperatorKind { mask, gaussian, identity };

std::string_view to_string(OperatorKind kind);

/// Refuse to materialize Gaussian ensembles with more coefficients than this (256 MiB).
inline constexpr Index kDefaultGaussianCap = Index{32} * 1024 * 1024;

/// Linear map A: R^{rows x cols} -> R^p together with its adjoint.
///
/// mask     - subsamples entries on a sorted observed set Omega (p = |Omega|), raw values.
/// gaussian - dense p x (rows*cols) matrix with i.i.d. N(0, 1/p) coefficients, regenerated
///            from (shape, p, seed).
/// identity - row-major vectorization, p = rows*cols.
///
/// Every kind carries a scalar gain (1 unless built through scaled()), so that
/// deliberately non-isometric operators can be expressed.
class MeasurementOperator {
 public:
  /// Placeholder 0x0 operator; assign a real one before use.
  MeasurementOperator() = default;

  static MeasurementOperator identity(Index rows, Index cols);
  static MeasurementOperator mask(SupportSet observed);
  static MeasurementOperator gaussian(Index rows, Index cols, Index p, std::uint64_t seed,
                                      Index max_coefficients = kDefaultGaussianCap);

  OperatorKind kind() const noexcept { return kind_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index output_dim() const noexcept { return output_dim_; }
  double gain() const noexcept { return gain_; }

  /// Observed set Omega; only valid for mask operators.
  const SupportSet& observed() const;
  /// Generator seed; only valid for gaussian operators.
  std::uint64_t seed() const;
  /// p x (rows*cols) coefficient matrix; only valid for gaussian operators.
  const Matrix& coefficients() const;

  /// Copy of this operator with every measurement multiplied by `factor`.
  MeasurementOperator scaled(double factor) const;

  /// Approximate flop count of one apply (or adjoint) call.
  double cost_hint() const noexcept;

  ObservationVector apply(const Matrix& x) const;
  Matrix adjoint(const ObservationVector& y) const;

  /// y += scale * A(e_linear), where e_linear is the unit matrix at a row-major position.
  void accumulate_unit(Index linear, double scale, ObservationVector& y) const;

 private:
  MeasurementOperator(OperatorKind kind, Index rows, Index cols, Index p)
      : kind_(kind), rows_(rows), cols_(cols), output_dim_(p) {}
  void check_input(const Matrix& x) const;

  OperatorKind kind_ = OperatorKind::identity;
  Index rows_ = 0;
  Index cols_ = 0;
  Index output_dim_ = 0;
  double gain_ = 1.0;
  SupportSet observed_;
  std::uint64_t seed_ = 0;
  Matrix coeffs_;
};

ObservationVector apply(const MeasurementOperator& op, const Matrix& x);
Matrix adjoint(const MeasurementOperator& op, const ObservationVector& y);

/// grad f(X) for f(X) = ||y - A X||_2^2, i.e. -2 A*(y - A X).
Matrix gradient(const MeasurementOperator& op, const ObservationVector& y, const Matrix& x);

MeasurementOperator make_identity_operator(Index rows, Index cols);

/// Omega of size round(fraction * rows * cols), uniform without replacement.
MeasurementOperator make_mask_operator(Index rows, Index cols, double fraction,
                                       std::uint64_t seed);

MeasurementOperator make_gaussian_operator(Index rows, Index cols, Index p, std::uint64_t seed,
                                           Index max_coefficients = kDefaultGaussianCap);

/// Observed index set as `row,col` lines.
void write_mask_csv(const std::filesystem::path& path, const SupportSet& observed);
SupportSet read_mask_csv(const std::filesystem::path& path, Index rows, Index cols);

}  // namespace lrsp
