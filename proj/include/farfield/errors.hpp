#pragma once

#include <stdexcept>
#include <string>

namespace farfield {

/// Input that violates an operation's precondition (wrong dimension, r <= 0, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration that cannot be assembled: empty control list, mesh condition
/// violated, non rotation-invariant operator handed to a radial routine, ...
class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Policy iteration or a fit failed to converge. Carries the last residual.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A golden baseline file is absent.
class MissingBaseline : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace farfield
