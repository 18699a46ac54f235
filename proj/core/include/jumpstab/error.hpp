#pragma once

#include <stdexcept>
#include <string>

namespace jumpstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant of an input object does not hold (bad shapes,
/// negative weights, boundary condition violated, gain bound not met, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A coefficient evaluator returned a value whose shape differs from the one
/// it declared.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Configuration that is well formed but unusable (e.g. a time step too
/// coarse for the fast scale).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical hypothesis failed at an evaluation point, e.g. a diffusion
/// matrix without a usable right inverse.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// A sample path left the representable range: a non-finite state or a
/// state norm above the divergence guard.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(what), time_(time) {}

  /// First grid time at which the bad state was observed.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace jumpstab
