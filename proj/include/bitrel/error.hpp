#pragma once

#include <stdexcept>
#include <string>

namespace bitrel {

// Caller violated a precondition (bad arguments, mismatched sizes).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file was readable but its contents are malformed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bitrel
