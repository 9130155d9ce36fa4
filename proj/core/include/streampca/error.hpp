#pragma once

#include <stdexcept>
#include <string>

namespace streampca {

/// Operand shapes do not agree (vector/matrix dimensions, sample sizes).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix expected to be positive semidefinite has a clearly negative
/// eigenvalue.
class NotPsdError : public std::domain_error {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : std::domain_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The Jacobi eigensolver ran out of sweeps.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double off_diagonal_residual)
      : std::runtime_error(what), residual_(off_diagonal_residual) {}
  double off_diagonal_residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// lambda1 == lambda2 (numerically): the limiting reference law is undefined.
class DegenerateGapError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive enumeration requested beyond the hard size cap.
class EnumerationTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace streampca
