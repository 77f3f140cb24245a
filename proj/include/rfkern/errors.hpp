#pragma once

#include <stdexcept>
#include <string>

namespace rfkern {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with the inputs handed to the library (bad shapes, bad values,
// unusable data files). The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failures during a solve. The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class EmptyDataError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class AllCensoredError : public DataError {
 public:
  using DataError::DataError;
};

class InvalidLabelError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientFeaturesError : public DataError {
 public:
  using DataError::DataError;
};

class NonPositiveSigmaError : public DataError {
 public:
  using DataError::DataError;
};

class ZeroVarianceError : public DataError {
 public:
  using DataError::DataError;
};

class NoComparablePairsError : public DataError {
 public:
  using DataError::DataError;
};

class CensoringUnattainableError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Carries the 1-based line number of the offending CSV line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, long line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class LadderExhaustedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class FactorizationFailureError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteObjectiveError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace rfkern
