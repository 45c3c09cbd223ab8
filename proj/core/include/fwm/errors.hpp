#pragma once

#include <stdexcept>
#include <string>

namespace fwm {

// Numeric failures. Argument and contract violations use std::invalid_argument.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneracyError : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IntegrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TrackingError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class OptimizationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace fwm
