#pragma once

#include <stdexcept>
#include <string>

namespace dpt {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or input. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure. The CLI maps this to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, double residual)
      : NumericError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Transverse chain stability lost (some mode has non-positive curvature).
class InstabilityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Laser beatnote too close to a motional mode.
class ResonanceError : public NumericError {
 public:
  ResonanceError(const std::string& what, int mode) : NumericError(what), mode_(mode) {}
  int mode() const { return mode_; }

 private:
  int mode_;
};

/// Requested problem exceeds the configured memory/size budget.
class CapacityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A model fit could not produce a meaningful estimate.
class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace dpt
