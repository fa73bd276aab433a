#pragma once

#include <stdexcept>
#include <string>

namespace mfrail {

// Base of every error raised by the library. Callers that only need a
// message catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (schema, ranges, cluster bounds).
class DataError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its admissible box, or an invalid correlation structure.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A failure time whose baseline jump is zero.
class BaselineSupportError : public Error {
 public:
  using Error::Error;
};

// Singular information in the M-step or the sandwich.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfrail
