#pragma once

#include <stdexcept>
#include <string>

namespace kfrac {

// Error taxonomy used across the library. The CLI maps these onto exit codes.

// An argument lies outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A caller-side contract was not met (e.g. missing zero boundary values).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Declared structural properties of the data are contradicted by the data.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The rim/valley geometry required by the saddle search cannot be certified.
struct GeometryFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Breakdown inside an iteration (NaN, failed factorization, lost bracket).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kfrac
