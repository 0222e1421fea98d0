#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nanoloc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physically inconsistent or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain an operation is defined on.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Failure while reading tabulated data; carries the 1-based row number.
class IngestionError : public Error {
 public:
  IngestionError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class AlphabetError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on a numerical routine (e.g. non-Hermitian input).
class ContractError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace nanoloc
