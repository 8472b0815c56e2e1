#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qpk {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (negative rate,
/// probability outside [0,1], rate beyond a server's capacity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A system configuration violates one or more regularity conditions.
/// Carries every failed condition, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> failures);

  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

/// Malformed input document or command parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on a configuration it does not apply to
/// (e.g. the symmetric Nash test on non-identical servers).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A measurement or sweep carries no usable information.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A scalar equation has no sign change on its search bracket.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// A simulated queue would be unstable at the queried prices.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A simulation produced no observations to average.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpk
