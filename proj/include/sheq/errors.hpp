#pragma once

#include <stdexcept>
#include <string>

namespace sheq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the documented domain of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not defined for this family or dimension.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A stated precondition (e.g. Hawkes, Dalang) does not hold.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// transition_density called on an exponent without integrable e^{-t Re Psi}.
class DensityUnavailable : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

/// amplitude_A with q + b <= d.
class InfiniteAmplitude : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature gave up before reaching tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double partial, double error)
      : Error(what + " (partial value " + std::to_string(partial) +
              ", error estimate " + std::to_string(error) + ")"),
        partial_value(partial),
        error_estimate(error) {}

  double partial_value;
  double error_estimate;
};

}  // namespace sheq
