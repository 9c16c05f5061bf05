#pragma once

#include <cstdint>

#include "lrsp/measurement.hpp"
#include "lrsp/solvers.hpp"

namespace lrsp {

/// Which measurement operator a synthetic instance is observed through.
struct ObservationModel {
  OperatorKind kind = OperatorKind::mask;
  double fraction = 0.3;  // mask: fraction of entries observed
  Index measurements = 0;  // gaussian: p

  static ObservationModel mask(double fraction) { return {OperatorKind::mask, fraction, 0}; }
  static ObservationModel gaussian(Index p) { return {OperatorKind::gaussian, 0.0, p}; }
  static ObservationModel identity() { return {OperatorKind::identity, 0.0, 0}; }
};

/// What sparse_scale multiplies: the RMS entry of L* (typical entry size) or max |L*_ij|.
enum class SparseScaleReference { rms, max };

struct InstanceParams {
  Index rows = 0;
  Index cols = 0;
  Index rank = 1;
  Index sparsity = 0;
  ObservationModel model;
  double noise_norm = 0.0;
  /// Gross sparse entries are N(0,1) * sparse_scale * (RMS or max of |L*_ij|) before
  /// normalization.
  double sparse_scale = 10.0;
  SparseScaleReference sparse_reference = SparseScaleReference::rms;
  std::uint64_t seed = 0;
};

/// Planted L* (rank k, U R^T with Gaussian factors) plus M* (s entries on a uniform
/// support), normalized so ||L* + M*||_F = 1, observed as y = A(L* + M*) + e with e
/// uniform on the sphere of radius noise_norm.
struct SyntheticInstance {
  InstanceParams params;
  Matrix low_rank;
  Matrix sparse;
  MeasurementOperator op;
  ObservationVector noise;
  ObservationVector observations;

  Matrix truth() const { return low_rank + sparse; }
  GroundTruth ground_truth() const { return {low_rank, sparse}; }
  ProblemSpec problem() const { return {op, observations, params.rank, params.sparsity}; }
  /// FNV-1a hash over the planted matrices, operator description and observations.
  std::uint64_t fingerprint() const;
};

SyntheticInstance generate_instance(const InstanceParams& params);

/// ||estimate - truth||_F / ||truth||_F.
double relative_error(const Matrix& estimate, const Matrix& truth);

}  // namespace lrsp
