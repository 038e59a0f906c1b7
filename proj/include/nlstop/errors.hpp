#pragma once

#include <stdexcept>
#include <string>

namespace nlstop {

// Raised when a structural assumption behind the solver fails at runtime,
// e.g. a candidate value function dips below the gain on its domain.
struct AssumptionViolation : std::runtime_error {
  explicit AssumptionViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a bracketed root search has no admissible root.
struct NoRootError : std::runtime_error {
  explicit NoRootError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an operation is not defined for the given risk mapping,
// e.g. derivative-based steps under the worst-case mapping.
struct UnsupportedOperation : std::runtime_error {
  explicit UnsupportedOperation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nlstop
