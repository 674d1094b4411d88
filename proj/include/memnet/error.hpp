#pragma once

#include <stdexcept>
#include <string>

namespace memnet {

// Base class for every error raised by the library. The CLI maps subclasses
// onto exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A pass-through ReLU unit saw a negative pre-activation.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class DuplicatePointError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class LabelRangeError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class ProjectionSearchExhausted : public Error {
 public:
  using Error::Error;
};

class ProvenanceError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace memnet
