#pragma once

#include <stdexcept>
#include <string>

namespace evpq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument or configuration is out of contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents do not follow the declared format.
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

/// Stored data violates a structural invariant (e.g. overlapping bit planes).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace evpq
