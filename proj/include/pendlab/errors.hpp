#pragma once

#include <stdexcept>
#include <string>

namespace pendlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition (dimension mismatch, non-positive parameter).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The equations-of-motion matrix could not be solved reliably.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// A time step produced a non-finite state or the solver failed mid-run.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time)
      : Error(what + " (t=" + std::to_string(time) + " s)"), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// No usable oscillation cycle was found in a trajectory.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pendlab
