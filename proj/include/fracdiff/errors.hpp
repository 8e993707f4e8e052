#pragma once

#include <stdexcept>

namespace fracdiff {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative special-function evaluation could not certify its tolerance.
class AccuracyLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Breakdown inside a solve, e.g. a non-positive pivot in tridiagonal elimination.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user configuration (CLI flags, problem files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fracdiff
