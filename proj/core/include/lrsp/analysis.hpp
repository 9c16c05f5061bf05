#pragma once

// Convergence-analysis tooling: Monte-Carlo restricted-isometry estimates, the coupled
// error recursions of the two solvers, and their stability.
//
// The RIP estimators are LOWER bounds on the true constants: they report the worst
// deviation seen over random test matrices, never a certificate.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lrsp/matrix_core.hpp"
#include "lrsp/measurement.hpp"

namespace lrsp {

/// RIP constants feeding the momentum solver's contraction matrix. The joint constants
/// bound A over sums of a rank-3k matrix and a 3s- (resp. 4s-) sparse matrix.
struct RipProfile {
  double delta_3k = 0.0;
  double delta_4k = 0.0;
  double delta_3s = 0.0;
  double delta_4s = 0.0;
  double delta_joint_3k3s = 0.0;
  double delta_joint_3k4s = 0.0;

  /// delta_3k := delta_4k and delta_3s := delta_4s (constants grow with order, so this
  /// only enlarges the contraction matrix); both joint constants set to `joint`.
  static RipProfile from_order4(double delta_4k, double delta_4s, double joint);

  /// Throws ArgumentError unless every constant lies in [0, 1).
  void validate() const;
};

/// Delta = [[alpha, beta], [zeta, gamma]] and its first-order lift
/// DeltaHat = [[(1+tau) Delta, tau Delta], [I, 0]].
struct ContractionMatrices {
  Matrix delta;      // 2 x 2
  Matrix delta_hat;  // 4 x 4
  double tau = 0.0;

  double alpha() const { return delta(0, 0); }
  double beta() const { return delta(0, 1); }
  double zeta() const { return delta(1, 0); }
  double gamma() const { return delta(1, 1); }
};

/// Published coupling constants of the greedy solver's error recursion
///   e_L' <= rho_1L e_L + rho_1M e_M + gamma_1 ||eps||
///   e_M' <= rho_2L e_L + rho_2M e_M + gamma_2 ||eps||
struct Theorem1Constants {
  double rho_1L = 0.1605;
  double rho_2L = 0.3431;
  double rho_1M = 0.3376;
  double rho_2M = 0.1414;
  double gamma_1 = 4.36;
  double gamma_2 = 4.45;

  static Theorem1Constants published() { return {}; }
  /// [[rho_1L, rho_1M], [rho_2L, rho_2M]].
  Matrix coupling() const;
};

// ---------------------------------------------------------------------------
// Monte-Carlo RIP estimates. Trial t draws from a generator seeded by (seed, t), so the
// result is independent of evaluation order. Test matrices are built incrementally and
// every prefix (rank 1..k, support size 1..s) is scored, which makes the estimates
// nondecreasing in the order for a fixed seed and trial count. Values are clamped to [0, 1];
// a value of 1 means the operator is not a restricted isometry at that order.

/// max |‖A X‖_2 / ‖X‖_F - 1| over random rank <= k matrices with Gaussian factors.
double estimate_rank_rip(const MeasurementOperator& op, Index k, int trials, std::uint64_t seed);

/// Same over random s-sparse matrices (uniform supports, Gaussian values).
double estimate_sparse_rip(const MeasurementOperator& op, Index s, int trials, std::uint64_t seed);

/// max ‖(A*A L)_F‖_F / ‖L‖_F over random rank-k L and uniform supports F, |F| = s.
/// Raw ratio, no absolute constant inferred.
double estimate_cross_rip(const MeasurementOperator& op, Index s, Index k, int trials,
                          std::uint64_t seed);

/// max |‖A X‖_2 / ‖X‖_F - 1| over X = L + M, L rank-k, M s-sparse, equal energy.
double estimate_joint_rip(const MeasurementOperator& op, Index k, Index s, int trials,
                          std::uint64_t seed);

/// Orders 3k/4k, 3s/4s and joint (3k,3s)/(3k,4s), each clamped to the ambient limits.
RipProfile estimate_rip_profile(const MeasurementOperator& op, Index k, Index s, int trials,
                                std::uint64_t seed);

bool rip_violated(double delta);

// ---------------------------------------------------------------------------
// Contraction and stability.

/// Throws ArgumentError if any constant is outside [0, 1) or tau < 0.
ContractionMatrices theorem2_contraction(const RipProfile& rip, double tau);

/// Largest eigenvalue modulus of a square matrix (general real eigensolver).
double spectral_radius(const Matrix& square);

/// Eigenvalues of [[(1+tau) D, tau D], [I, 0]] from those of the 2x2 D: each eigenvalue d
/// of D contributes the two roots of lambda^2 - (1+tau) d lambda - tau d = 0.
std::vector<std::complex<double>> companion_eigenvalues(const Matrix& delta, double tau);
double companion_spectral_radius(const Matrix& delta, double tau);

struct RecursionEnvelope {
  std::vector<Vector> states;  // w(0), w(1), ..., w(iters)
  double spectral_radius = 0.0;
  bool converges = false;  // spectral_radius < 1

  /// First i with max_j w_j(i) <= fraction * max_j w_j(0), or -1 if never reached.
  int steps_to_fraction(double fraction) const;
};

/// Iterates w(i+1) = DeltaHat w(i). w0 must be nonnegative.
RecursionEnvelope simulate_recursion(const Matrix& delta_hat, const Vector& w0, int iters);

/// Steady-state envelope (I - R)^{-1} (gamma_1, gamma_2)^T ||eps|| of the greedy solver's
/// recursion. Throws ArgumentError when the coupling matrix has spectral radius >= 1.
Vector noise_floor(const Theorem1Constants& constants, double noise_norm);

/// "STABLE rho=<r>" or "UNSTABLE rho=<r>".
std::string stability_verdict(double rho);

/// `quantity,value` CSV.
void write_quantities_csv(std::ostream& out,
                          const std::vector<std::pair<std::string, double>>& quantities);

}  // namespace lrsp
