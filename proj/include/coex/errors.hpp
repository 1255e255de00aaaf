#pragma once

#include <stdexcept>
#include <string>

namespace coex {

/// Invalid argument for a model formula (degenerate probabilities, non-positive durations).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A fixed-point or root solve did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Scenario or profile violates an invariant; raised before any simulation event.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed scenario or sweep file. The message names the offending key or line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation-time invariant did not hold (time conservation, orthogonality).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coex
