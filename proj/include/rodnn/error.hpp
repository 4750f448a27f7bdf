#pragma once

#include <stdexcept>
#include <string>

namespace rodnn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a value (grid size, distance, geometry, config key) failed.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Array shapes disagree, e.g. a field applied to a layer on another grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed IDX / RODN / config input.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rodnn
