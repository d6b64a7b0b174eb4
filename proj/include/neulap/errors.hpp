#pragma once

#include <stdexcept>
#include <string>

namespace neulap {

// Thrown when a profile fails the structural requirements of an operation
// (wrong family, derivative sign pattern, non-finite evaluation).
struct HypothesisError : std::runtime_error {
  explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad scalar argument (kappa >= 1, negative eta, k < 1, ...).
struct ParameterError : std::invalid_argument {
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Assembly refused because the width weight is too small for double precision.
struct ConditioningError : std::runtime_error {
  explicit ConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh/constraint construction failed (tie outside the base edge, rank loss).
struct AssemblyError : std::runtime_error {
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigensolver breakdown after the permitted restart.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigenvalue too close to a neighbor for a per-eigenfunction comparison.
struct DegeneracyError : std::runtime_error {
  explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file rejected; message carries the section.key path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace neulap
