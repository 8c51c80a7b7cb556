#pragma once

#include <stdexcept>
#include <string>

namespace plc {

// Base for every error the library raises. The CLI maps each subclass to an
// exit code, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor or matrix extents.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Factorization failure, underflow, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates an operation's precondition (e.g. fewer points
// than clusters, single-class labels).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed files: bad magic, bad version, truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace plc
