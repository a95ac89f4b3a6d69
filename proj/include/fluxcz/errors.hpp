#pragma once

#include <stdexcept>
#include <string>

namespace fluxcz {

// Base for all library failures that the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete experiment configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: truncation, non-convergence, ambiguous labels,
// integrator breakdown (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class LabelingError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IntegrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A diagonal entry of the computational evolution is too small for its
// phase to be defined.
class IllDefinedPhaseError : public NumericError {
 public:
  using NumericError::NumericError;
};

// The optimizer could not improve on the undriven gate (exit code 4).
class OptimizerError : public Error {
 public:
  using Error::Error;
};

}  // namespace fluxcz
