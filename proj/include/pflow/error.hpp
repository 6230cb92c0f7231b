#pragma once

#include <stdexcept>
#include <string>

namespace pflow {

/// Base of every error raised by the library. `kind()` is a stable short
/// identifier used in machine-readable error records.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

/// A particle state left the ordered configuration space.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "state_outside_domain"; }
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  const char* kind() const noexcept override { return "quadrature_failure"; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

class AdmissibilityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "inadmissible"; }
};

class StiffnessError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "stiffness_failure"; }
};

class NormalizationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "normalization"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

}  // namespace pflow
