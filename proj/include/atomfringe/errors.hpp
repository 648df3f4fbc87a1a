#pragma once

#include <stdexcept>
#include <string>

namespace atomfringe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state violates its physical invariants (normalization, ordering, PSD).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the domain of an operation (u <= 0, V > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A data set does not determine the requested unknowns.
class IllPosed : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// An iterative search gave up; `best_value()` holds the best objective seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value)
      : Error(what), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

/// A self-consistency guard tripped. Indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace atomfringe
