#pragma once

#include <stdexcept>
#include <string>

namespace psdbw {

// Base class of every error raised by the library. Numerical and domain
// failures derive from NumericalError so callers (the CLI in particular) can
// tell them apart from bad arguments.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  DimensionMismatch(long lhs, long rhs)
      : InvalidArgument("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// A matrix expected to be positive semi-definite has an eigenvalue below -tol.
class NotPsdError : public NumericalError {
 public:
  NotPsdError(double eigenvalue, const std::string& what)
      : NumericalError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// A matrix expected to be positive definite has an eigenvalue <= tol.
class NotPdError : public NumericalError {
 public:
  NotPdError(double eigenvalue, const std::string& what)
      : NumericalError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Tangent vector outside the domain where the Bures-Wasserstein exp map is
// the inverse of the log map.
class ExpDomainError : public NumericalError {
 public:
  ExpDomainError(double eigenvalue, const std::string& what)
      : NumericalError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace psdbw
