#pragma once

#include <stdexcept>
#include <string>

namespace slcomm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its admissible range (e.g. p < 1).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible dimensions.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine hit its iteration cap.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A wire message or decoded payload is inconsistent with its header.
class MalformedMessage : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but exceeds a hard format limit.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A protocol or scenario configuration is inconsistent.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace slcomm
