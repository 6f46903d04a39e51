#pragma once

#include <stdexcept>
#include <string>

namespace rkcca {

/// Base class for all library errors. The CLI maps the subclasses onto
/// stable exit codes (user error 1, I/O error 2, numeric failure 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. t < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or non-finite input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Violated pre-condition between arguments (shape mismatch, off-simplex weights).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot support the requested estimate (all points identical, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-PSD Gram, singular system, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rkcca
