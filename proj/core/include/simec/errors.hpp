#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simec {

// Exception hierarchy. The CLI maps ConfigError to exit code 2 and
// NumericalError to exit code 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between a vector/matrix and the object it is applied to.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed model file or unsupported activation name.
class ModelFormatError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The metric has no null (or no positive) direction where one is required.
class DegenerateMetricError : public NumericalError {
 public:
  DegenerateMetricError(const std::string& what, std::ptrdiff_t step = -1)
      : NumericalError(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}

  /// Iteration index at which the failure happened, or -1 if not inside a loop.
  std::ptrdiff_t step() const noexcept { return step_; }

 private:
  std::ptrdiff_t step_;
};

class TrainingDivergedError : public NumericalError {
 public:
  explicit TrainingDivergedError(std::size_t epoch)
      : NumericalError("training diverged: non-finite loss at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace simec
