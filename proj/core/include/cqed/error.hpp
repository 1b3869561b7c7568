#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Exit-code classes used by the command-line tool.
enum class ErrorClass { config = 1, numeric = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorClass::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::io, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorClass::numeric, what) {}
};

// Charge-basis cutoff too small for the requested levels.
class CutoffError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Dressed states cannot be assigned to bare product states.
class LabelingAmbiguityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : NumericError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class StepFailureError : public NumericError {
 public:
  using NumericError::NumericError;
};

class PositivityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UnreachableDetuningError : public NumericError {
 public:
  using NumericError::NumericError;
};

class SamplingTooCoarseError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateNormalizationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InconsistentSignError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace cqed
