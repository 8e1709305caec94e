#pragma once

#include <stdexcept>
#include <string>

namespace lightfc {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes or parameter layouts that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf produced by a kernel.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed user input: files, configs, boxes, command arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lightfc
