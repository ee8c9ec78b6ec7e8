#pragma once

#include <stdexcept>
#include <string>

namespace pondscat {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid physical configuration or derived-parameter constraint violation.
struct ParameterError : Error { using Error::Error; };

/// Malformed config text (carries a line reference in the message).
struct ParseError : Error { using Error::Error; };

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error { using Error::Error; };

/// Integration step too coarse for the pulse envelope.
struct StepError : Error { using Error::Error; };

/// Operation called on a state that does not satisfy its precondition.
struct StateError : Error { using Error::Error; };

/// Run configuration exceeds hard limits (e.g. trajectory cap).
struct ConfigError : Error { using Error::Error; };

/// No input data where at least one element is required.
struct EmptyError : Error { using Error::Error; };

}  // namespace pondscat
