#pragma once

#include <stdexcept>
#include <string>

namespace gaussig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A guarded node (log, sqrt, reciprocal, ...) received an argument outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A quadrature node evaluated to +-inf or NaN.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// Refinement did not bring the error estimate under the requested tolerance.
/// Carries the last value and error estimate so callers can decide what to do.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_value, double last_error)
      : Error(what), last_value_(last_value), last_error_(last_error) {}
  double last_value() const noexcept { return last_value_; }
  double last_error() const noexcept { return last_error_; }

 private:
  double last_value_;
  double last_error_;
};

class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

class NotADensity : public Error {
 public:
  using Error::Error;
};

class NotMonotone : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration, corpus or quadrature settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gaussig
