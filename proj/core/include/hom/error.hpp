#pragma once

#include <stdexcept>
#include <string>

namespace hom {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hom
