#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "farfield/grid.hpp"
#include "farfield/howard.hpp"
#include "farfield/operator_core.hpp"

namespace farfield {

using BoundaryFn = std::function<double(const Eigen::VectorXd&)>;

/// F(D^2 u) = rhs on a radial or polar domain with Dirichlet data. Radial data is evaluated at
/// the boundary radius on the first axis; explicit per-node values take precedence.
struct DirichletProblem {
  OperatorSpec op;
  std::variant<RadialGrid, PolarGrid> domain;
  double rhs = 0.0;
  BoundaryFn boundary;
  std::vector<double> boundary_values;
};

struct SolveOptions {
  HowardOptions howard;
  /// Orthogonal frames sampled by the polar scheme.
  int frames = 8;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  int policy_switches = 0;
  double wall_ms = 0.0;
  /// Boundary interpolation error estimate (ball sequences only).
  double interpolation_error = 0.0;

  /// JSON object with iterations, residual, policy_switches, wall_ms.
  std::string to_json() const;
};

struct Solution {
  GridFunction u;
  SolveReport report;
};

/// Rejects a non rotation-invariant operator or a violated mesh condition
/// (InvalidConfiguration); propagates NonConvergence.
Solution solve_radial(const DirichletProblem& p, const SolveOptions& options = {});
/// Requires n = 2 and frames >= 4.
Solution solve_polar(const DirichletProblem& p, const SolveOptions& options = {});
/// Dispatches on the domain type.
Solution solve(const DirichletProblem& p, const SolveOptions& options = {});

struct ComparisonReport {
  bool pass = true;
  /// max over nodes of u_f - u_g (<= 1e-12 on success).
  double worst = 0.0;
};

/// Solves with boundary data f and g (f <= g on the boundary nodes, else InvalidInput) and
/// checks u_f <= u_g + 1e-12 at every node.
ComparisonReport discrete_comparison_check(const DirichletProblem& p, const BoundaryFn& f, const BoundaryFn& g,
                                           const SolveOptions& options = {});

struct ConvergenceRow {
  int level = 0;
  double spacing = 0.0;
  double sup_error = 0.0;
  /// log2(e_{k-1} / e_k); NaN on the first level.
  double order = 0.0;
};

/// Halves the spacing per level (polar grids also double the angular count) and compares the
/// solution with `exact` at every node.
std::vector<ConvergenceRow> convergence_study(const DirichletProblem& p, const BoundaryFn& exact, int levels,
                                              const SolveOptions& options = {});

/// Grid resolution for each ball of a ball sequence.
struct BallOptions {
  int radial_nodes = 1025;
  int polar_radial_nodes = 33;
  int polar_angular_nodes = 64;
  SolveOptions solve;
};

struct BallSolution {
  double radius = 0.0;
  Solution solution;
};

/// Solves F(D^2 v_i) = rhs on B_{R_i} with v_i = u on the sphere of radius R_i for each
/// scheduled radius. Radial exterior data gives radial ball solves in u's dimension; polar
/// data gives disc solves with boundary values by cubic interpolation.
std::vector<BallSolution> solve_ball_sequence(const GridFunction& exterior, const OperatorSpec& f, double rhs,
                                              const std::vector<double>& schedule, const BallOptions& options = {});

}  // namespace farfield
