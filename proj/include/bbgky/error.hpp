#pragma once

#include <stdexcept>
#include <string>

namespace bbgky {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator dimensions or particle counts do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Particle labels out of range or repeated.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (d^s, partition count) would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (positivity, symmetry, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Requested expansion order has no implemented closed form.
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed (step underflow, NaN, instability).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace bbgky
