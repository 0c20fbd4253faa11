#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fermikit {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs that violate a documented precondition (bad order, negative fugacity, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

class UnsupportedOrder : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

class NegativeFugacity : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

class NonPositiveInput : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

class DegeneratePoint : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

/// A solver could not deliver a result within its contract.
class NumericalError : public Error {
public:
  using Error::Error;
};

class NoBracket : public NumericalError {
public:
  NoBracket(double lo, double hi, double f_lo, double f_hi)
      : NumericalError("root not bracketed on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "]: f(lo)=" + std::to_string(f_lo) + ", f(hi)=" + std::to_string(f_hi)),
        lo_(lo), hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

/// Iteration budget exhausted. Carries the last iterate so callers can inspect it.
class MaxIterExceeded : public NumericalError {
public:
  MaxIterExceeded(std::string what, double residual, std::vector<double> last = {})
      : NumericalError(std::move(what)), residual_(residual), last_(std::move(last)) {}

  double residual() const noexcept { return residual_; }
  const std::vector<double>& last_iterate() const noexcept { return last_; }

private:
  double residual_;
  std::vector<double> last_;
};

class Diverged : public NumericalError {
public:
  Diverged(std::string what, double residual)
      : NumericalError(std::move(what)), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class NonConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// No critical temperature in the probed range. Not a failure of the run.
class NoTransition : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace fermikit
