// SPDX-License-Identifier: MIT
// Error types shared by the favard library and its command-line driver.
#pragma once

#include <stdexcept>
#include <string>

namespace favard {

// A hypothesis or precondition of an operation does not hold for its input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An input would exceed the resource guard of an operation.
class ResourceError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A checked post-condition or structural invariant failed.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Reading, parsing or writing an external file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace favard
