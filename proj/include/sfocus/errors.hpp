#pragma once

#include <stdexcept>
#include <string>

namespace sfocus {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (negative density,
/// x <= 0 where x > 0 is required, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation requested exactly at the focal time.
class SingularTimeError : public Error {
public:
  using Error::Error;
};

/// An asymptotic formula was evaluated outside its region of validity.
class ValidityError : public Error {
public:
  using Error::Error;
};

/// The stationary-point cubic degenerates (double root on the parabola edge).
class EdgeDegeneracyError : public ValidityError {
public:
  using ValidityError::ValidityError;
};

/// Data layout problems: too few samples, asymmetric trajectories, step-count
/// mismatches.
class StructureError : public Error {
public:
  using Error::Error;
};

/// Numerical blow-up, carrying the last time at which the state was valid.
class BlowUpError : public Error {
public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Iterative solver failed to converge; carries the last residual.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace sfocus
