#pragma once

#include <stdexcept>
#include <string>

namespace lrsp {

/// Caller passed something outside an operation's domain (bad shape, budget, order...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated input file. The message names the offending line or byte offset.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative kernel hit its iteration cap without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Unrecoverable numerical breakdown inside a solver (NaN/Inf in an iterate).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrsp
