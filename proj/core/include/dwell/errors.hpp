#pragma once

#include <stdexcept>

namespace dwell {

// Error taxonomy mirrors the CLI exit-code contract:
//   ConfigError -> 2, NumericError -> 3, InvariantError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct InvariantError : Error {
  using Error::Error;
};

// Requested operation is undefined in the configured (E, V0) regime.
struct RegimeError : ConfigError {
  using ConfigError::ConfigError;
};

struct OutOfDomainError : NumericError {
  using NumericError::NumericError;
};

struct CalibrationError : NumericError {
  using NumericError::NumericError;
};

}  // namespace dwell
