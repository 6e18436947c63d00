#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voros {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input sequence; `index` is 1-based and names the first offending entry.
class ValidationError : public Error {
public:
  ValidationError(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Parameter outside the domain where the mathematics is defined.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Overflow of the representable exponent range, or a bracket that ran away.
class RangeError : public Error {
public:
  RangeError(const std::string& what, double magnitude)
      : Error(what + " (magnitude " + std::to_string(magnitude) + ")"), magnitude_(magnitude) {}
  double magnitude() const noexcept { return magnitude_; }

private:
  double magnitude_;
};

/// Evaluation of a ratio at (or too close to) a zero of its denominator.
class PoleGuardError : public Error {
public:
  using Error::Error;
};

class FitError : public Error {
public:
  using Error::Error;
};

/// ODE integration failure (step underflow, non-finite state).
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double location)
      : Error(what + " (at z=" + std::to_string(location) + ")"), location_(location) {}
  double location() const noexcept { return location_; }

private:
  double location_;
};

/// Near-singular Wronskian denominator.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// Persisted data that does not parse or violates its schema.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace voros
