#pragma once

#include <stdexcept>
#include <string>

namespace escapelab {

// Base of every error thrown by the library. The C API maps each subclass to
// a status code, and the CLI maps status codes to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (|q| >= 1 for a
// Busemann function, delta >= n for the pressure, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidIsometryError : public Error {
 public:
  using Error::Error;
};

// Input data violates a structural invariant (overlapping Schottky disks,
// malformed configuration, unknown keys).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Not enough numerical signal to produce an estimate (every MC point
// saturated, nothing trapped up to the requested time, ...).
class SignalError : public Error {
 public:
  using Error::Error;
};

// A certified bound could not be established (tail of a group sum does not
// decay, xi too close to the limit set).
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// The quadrature grid does not resolve the oscillation of the integrand.
class ResolutionError : public Error {
 public:
  using Error::Error;
  int required_points = 0;
};

class ReductionError : public Error {
 public:
  using Error::Error;
};

// Persisted record does not match the supported schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace escapelab
