#pragma once

#include <stdexcept>
#include <string>

namespace proxis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand lengths do not match an operator's shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A symmetric positive-definite factorization failed.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// An iterative method produced non-finite iterates.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A regularizer kind is not handled by the requested operation.
class UnsupportedRegularizerError : public Error {
 public:
  using Error::Error;
};

}  // namespace proxis
