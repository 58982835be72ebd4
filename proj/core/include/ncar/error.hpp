#pragma once

#include <stdexcept>
#include <string>

namespace ncar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The AR polynomial has a root within the unit-circle margin.
class UnitCircleRoot : public Error {
 public:
  using Error::Error;
};

/// An iterative expansion did not reach its tolerance before its hard cap.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}

  [[nodiscard]] double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Every trimmed residual is equal, so the autocorrelation denominator is zero.
class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

/// The Durbin-Levinson recursion hit a vanishing denominator.
class SingularToeplitz : public Error {
 public:
  using Error::Error;
};

/// The autocorrelation Toeplitz matrix is not positive definite.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

}  // namespace ncar
