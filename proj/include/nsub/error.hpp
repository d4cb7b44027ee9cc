#pragma once

#include <stdexcept>
#include <string>

namespace nsub {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (OBJ, checkpoint, map or dataset files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Connectivity that is not a closed, orientable 2-manifold.
class TopologyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Shape or dimension mismatch between arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a valid result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsub
