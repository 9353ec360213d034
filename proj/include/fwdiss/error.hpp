#pragma once

#include <stdexcept>
#include <string>

namespace fwdiss {

/// Process exit codes shared by the CLI and the report writers.
enum class ExitCode : int {
  ok = 0,
  verification_failure = 2,
  configuration = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept = 0;
};

/// Invalid parameters, grids, windows or file contents.
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::configuration; }
};

/// Argument outside the mathematical domain of an operation (t < 0, q < 1, ...).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Grid too coarse for the requested evaluation.
class ResolutionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Fewer samples than a fit or report needs.
class InsufficientDataError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

/// Quadrature failed to converge.
class AccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A computed quantity violated an invariant it must satisfy (mass, realness).
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StabilityError : public NumericalError {
 public:
  StabilityError(const std::string& what, double suggested_dt)
      : NumericalError(what), suggested_dt_(suggested_dt) {}
  [[nodiscard]] double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Fixed-point iteration stopped contracting.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fwdiss
