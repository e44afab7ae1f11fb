#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "farfield/asymptotics.hpp"
#include "farfield/fd_solver.hpp"
#include "farfield/fitting.hpp"
#include "farfield/operator_core.hpp"

namespace farfield {

struct LinearProfile {
  Eigen::VectorXd gradient;
  double constant = 0.0;

  Polynomial polynomial() const { return Polynomial::affine(gradient, constant); }
};

struct QuadraticProfile {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  double constant = 0.0;
  /// F(D^2 P).
  double operator_value = 0.0;

  Polynomial polynomial() const;
};

/// One scheduled radius of the ball-sequence construction.
struct ExtractionStep {
  double radius = 0.0;
  /// max and min over the unit sphere of v_i - u.
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd touching_point;
  /// Dv_i at the touching point (quadratic pipeline).
  Eigen::VectorXd touching_gradient;
  Polynomial fit;
  double fit_residual = 0.0;
  /// Profile change against the previous step (inf on the first).
  double delta = 0.0;
  SolveReport report;
};

struct ExtractionTrace {
  std::vector<ExtractionStep> steps;
  /// "max", "min", or "none" before a branch is chosen.
  std::string branch = "none";
  bool converged = false;
  double slack = 0.0;
  /// Worst one-sided certificate value: min(u - P) on the max branch, min(Q - u) on the min branch.
  double certificate = 0.0;
  double max_touching_gradient = 0.0;
  bool gradient_bounded = true;
  /// Constant added after extraction and the limit estimate it came from.
  double normalization_shift = 0.0;
  std::string normalization = "none";
  LimitEstimate limit;

  std::string to_json() const;
};

/// Schedule exhausted, certificate violated or constraint missed. Carries the partial trace.
class ExtractionError : public std::runtime_error {
 public:
  enum class Kind { NotConverged, CertificateViolated, ConstraintViolated };
  ExtractionError(Kind kind, const std::string& what, ExtractionTrace trace)
      : std::runtime_error(what), kind_(kind), trace_(std::move(trace)) {}
  Kind kind() const noexcept { return kind_; }
  const ExtractionTrace& trace() const noexcept { return trace_; }

 private:
  Kind kind_;
  ExtractionTrace trace_;
};

struct ExtractionOptions {
  std::vector<double> schedule{4.0, 8.0, 16.0, 32.0, 64.0};
  /// Consecutive profile deltas below this stop the iteration.
  double tolerance = 1e-3;
  /// Fit ball radius; 0 picks 2 (linear) or 4 (quadratic).
  double fit_radius = 0.0;
  /// Floor added to the discretization slack of the certificate.
  double slack_floor = 1e-6;
  /// |u| <= K (1 + |x|^k) with k = 1 (linear) or 2 (quadratic).
  double growth_bound = 10.0;
  /// Allowed |F(D^2 P) - A| for quadratic profiles.
  double constraint_tolerance = 0.05;
  /// Bound C in |Dv_i(x_i)| <= C.
  double gradient_bound = 1e3;
  int directions = 64;
  BallOptions ball;
};

struct LinearExtraction {
  LinearProfile profile;
  ExtractionTrace trace;
};

struct QuadraticExtraction {
  QuadraticProfile profile;
  ExtractionTrace trace;
};

/// Linear profile P with u - P comparable to a fundamental solution. Solves F = 0 on the
/// scheduled balls with v_i = u on their boundary, measures a_i = max (v_i - u) and
/// b_i = min (v_i - u) on the unit sphere and fits v_i on B_2 by an affine polynomial. The
/// one-sided branch is the one whose certificate (u >= P or u <= Q) holds within the slack.
///
/// The constant is normalized afterwards: with a finite limit u_inf of u - P it becomes
/// P + u_inf; otherwise far sphere means of u minus the linear part are fitted against
/// {1, phi} and {1, -phi_tilde} and the intercept of the better fit is used.
LinearExtraction extract_linear_profile(const GridFunction& u, const OperatorSpec& f,
                                        const ExtractionOptions& options = {});

/// Quadratic profile for F(D^2 u) = A. Balls solve F = A; v_i minus the tangent plane of v_i at
/// the touching point is fitted by a quadratic on B_4. Throws ExtractionError with kind
/// ConstraintViolated when |F(D^2 P) - A| exceeds the tolerance.
QuadraticExtraction extract_quadratic_profile(const GridFunction& u, const OperatorSpec& f, double rhs,
                                              const ExtractionOptions& options = {});

}  // namespace farfield
