#pragma once

#include <utility>
#include <vector>

#include "farfield/policy_form.hpp"

namespace farfield {

/// Affine row sum_k w_k u_k + constant.
struct LinearRow {
  std::vector<std::pair<int, double>> entries;
  double constant = 0.0;

  double apply(const std::vector<double>& u) const;
};

/// A discrete Bellman system: at every free node, the max (or min) over finitely many
/// monotone affine rows vanishes; Dirichlet nodes carry fixed values.
class PolicyProblem {
 public:
  virtual ~PolicyProblem() = default;

  virtual int size() const = 0;
  virtual Sense sense() const = 0;
  virtual bool is_dirichlet(int i) const = 0;
  virtual double dirichlet_value(int i) const = 0;
  virtual int policy_count(int i) const = 0;
  /// Values of every policy at node i for the iterate u.
  virtual void policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const = 0;
  virtual void policy_row(int i, int policy, LinearRow& row) const = 0;
  /// True when every row only couples i-1, i, i+1.
  virtual bool tridiagonal() const { return false; }
};

struct HowardOptions {
  int max_iterations = 200;
  /// Bound on the scaled residual, see HowardResult::residual.
  double tolerance = 1e-10;
  /// Relaxation used once a policy cycle is detected.
  double damping = 0.5;
};

struct HowardResult {
  std::vector<double> u;
  int iterations = 0;
  /// max_i |F_h(u)_i| / (max_i |a_ii| * max(1, max_i |u_i|)).
  double residual = 0.0;
  /// Total number of node policy changes over all iterations.
  int policy_switches = 0;
  bool damped = false;
};

/// Howard policy iteration. Stops at a policy fixpoint or when the scaled residual falls
/// below the tolerance; throws NonConvergence after max_iterations.
HowardResult howard_solve(const PolicyProblem& problem, const HowardOptions& options = {});

/// Scaled residual of the Bellman system at u (same scaling as HowardResult::residual).
double bellman_residual(const PolicyProblem& problem, const std::vector<double>& u);

}  // namespace farfield
