#pragma once

#include <stdexcept>
#include <string>

namespace levyflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimension mismatch, range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An experiment config or serialized file failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical guard tripped: CFL violation, blow-up, failed internal check.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace levyflow
