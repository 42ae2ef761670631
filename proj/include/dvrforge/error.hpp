#pragma once

#include <stdexcept>
#include <string>

namespace dvrforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid family parameters, malformed specs, bad sizes.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the support of a measure or a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point value does not fit its representable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Register width budget exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A zero recurrence coefficient makes a column scaling singular.
class SingularScalingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// State-preparation or reflection check failed.
class SynthesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace dvrforge
