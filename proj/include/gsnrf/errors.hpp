#pragma once

#include <stdexcept>
#include <string>

namespace gsnrf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "DomainError"; }
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "DimensionMismatch"; }
};

/// A Cholesky pivot was non-positive.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NotPositiveDefinite"; }
};

class NoBracket : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NoBracket"; }
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "UnsupportedDimension"; }
};

/// Adaptive quadrature stopped short of its tolerance; carries the achieved estimate.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : Error(what + " (error estimate " + std::to_string(error_estimate) + ")"),
        error_estimate_(error_estimate) {}
  const char* kind() const noexcept override { return "QuadratureError"; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace gsnrf
