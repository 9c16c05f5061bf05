#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "lrsp/analysis.hpp"
#include "lrsp/errors.hpp"

namespace lrsp {

RipProfile RipProfile::from_order4(double delta_4k, double delta_4s, double joint) {
  return RipProfile{delta_4k, delta_4k, delta_4s, delta_4s, joint, joint};
}

void RipProfile::validate() const {
  const double all[] = {delta_3k, delta_4k, delta_3s, delta_4s, delta_joint_3k3s,
                        delta_joint_3k4s};
  for (double d : all) {
    if (!(d >= 0.0 && d < 1.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "RIP constant %g outside [0, 1)", d);
      throw ArgumentError(buf);
    }
  }
}

Matrix Theorem1Constants::coupling() const {
  Matrix r(2, 2);
  r << rho_1L, rho_1M, rho_2L, rho_2M;
  return r;
}

ContractionMatrices theorem2_contraction(const RipProfile& rip, double tau) {
  rip.validate();
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ArgumentError("momentum must be >= 0");

  const double d3k = rip.delta_3k;
  const double d4k = rip.delta_4k;
  const double d3s = rip.delta_3s;
  const double d4s = rip.delta_4s;
  const double alpha = 4.0 * d3k / (1.0 - d3k) + 2.0 * d4k / (1.0 - d3k) * (2.0 * d3k + 2.0 * d4k);
  const double beta = 2.0 * rip.delta_joint_3k3s / (1.0 - d3k);
  const double gamma = 2.0 * (d4s + d3s) / (1.0 - d3s);
  const double zeta = 2.0 * rip.delta_joint_3k4s / (1.0 - d3s);

  ContractionMatrices c;
  c.tau = tau;
  c.delta.resize(2, 2);
  c.delta << alpha, beta, zeta, gamma;
  c.delta_hat = Matrix::Zero(4, 4);
  c.delta_hat.topLeftCorner(2, 2) = (1.0 + tau) * c.delta;
  c.delta_hat.topRightCorner(2, 2) = tau * c.delta;
  c.delta_hat.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
  return c;
}

double spectral_radius(const Matrix& square) {
  if (square.rows() != square.cols() || square.rows() == 0) {
    throw ArgumentError("spectral_radius: matrix must be square and nonempty");
  }
  if (!square.allFinite()) throw ArgumentError("spectral_radius: non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(square), false);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue iteration failed", 0.0);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<std::complex<double>> companion_eigenvalues(const Matrix& delta, double tau) {
  using C = std::complex<double>;
  if (delta.rows() != 2 || delta.cols() != 2) {
    throw ArgumentError("companion_eigenvalues: expected a 2x2 matrix");
  }
  const double tr = delta.trace();
  const double det = delta.determinant();
  const C disc = std::sqrt(C(tr * tr - 4.0 * det));
  std::vector<C> out;
  for (const C d : {0.5 * (tr + disc), 0.5 * (tr - disc)}) {
    // lambda^2 - (1+tau) d lambda - tau d = 0
    const C b = (1.0 + tau) * d;
    const C root = std::sqrt(b * b + 4.0 * tau * d);
    out.push_back(0.5 * (b + root));
    out.push_back(0.5 * (b - root));
  }
  return out;
}

double companion_spectral_radius(const Matrix& delta, double tau) {
  double rho = 0.0;
  for (const auto& z : companion_eigenvalues(delta, tau)) rho = std::max(rho, std::abs(z));
  return rho;
}

int RecursionEnvelope::steps_to_fraction(double fraction) const {
  if (states.empty()) return -1;
  const double target = fraction * states.front().maxCoeff();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].maxCoeff() <= target) return static_cast<int>(i);
  }
  return -1;
}

RecursionEnvelope simulate_recursion(const Matrix& delta_hat, const Vector& w0, int iters) {
  if (delta_hat.rows() != delta_hat.cols() || delta_hat.rows() != w0.size()) {
    throw ArgumentError("simulate_recursion: dimension mismatch");
  }
  if (iters < 0) throw ArgumentError("simulate_recursion: negative iteration count");
  if ((w0.array() < 0.0).any()) throw ArgumentError("simulate_recursion: w0 must be nonnegative");

  RecursionEnvelope env;
  env.spectral_radius = spectral_radius(delta_hat);
  env.converges = env.spectral_radius < 1.0;
  env.states.reserve(static_cast<std::size_t>(iters) + 1);
  env.states.push_back(w0);
  for (int i = 0; i < iters; ++i) env.states.push_back(delta_hat * env.states.back());
  return env;
}

Vector noise_floor(const Theorem1Constants& constants, double noise_norm) {
  if (!(noise_norm >= 0.0)) throw ArgumentError("noise_floor: noise norm must be >= 0");
  const Matrix r = constants.coupling();
  const double rho = spectral_radius(r);
  if (rho >= 1.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "no fixed point: coupling spectral radius %.6g >= 1", rho);
    throw ArgumentError(buf);
  }
  Vector g(2);
  g << constants.gamma_1, constants.gamma_2;
  return (Matrix::Identity(2, 2) - r).partialPivLu().solve(g) * noise_norm;
}

std::string stability_verdict(double rho) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s rho=%.6f", rho < 1.0 ? "STABLE" : "UNSTABLE", rho);
  return buf;
}

void write_quantities_csv(std::ostream& out,
                          const std::vector<std::pair<std::string, double>>& quantities) {
  out << "quantity,value\n";
  char buf[40];
  for (const auto& [name, value] : quantities) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << name << ',' << buf << '\n';
  }
}

}  // namespace lrsp
