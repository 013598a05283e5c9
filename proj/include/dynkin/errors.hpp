#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dynkin {

/// Malformed arguments: wrong shapes, bad index sets, out-of-domain parameters.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A generator matrix failed validation (wrong sign pattern, not transient, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization or inversion broke down. Carries the failing pivot when known.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg, Eigen::Index pivot = -1)
      : std::runtime_error(msg), pivot_(pivot) {}
  Eigen::Index pivot() const { return pivot_; }

 private:
  Eigen::Index pivot_;
};

/// A truncated series failed to reach tolerance within the term budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated path hit the jump cap without being absorbed.
class PathCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conditional Monte Carlo estimator accepted zero samples.
class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dynkin
