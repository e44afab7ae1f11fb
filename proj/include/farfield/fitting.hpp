#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace farfield {

/// Ordinary least squares y ~ a + b x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  /// Residual sum of squares.
  double rss = 0.0;
};

/// Requires at least two points with distinct x. Throws InvalidInput otherwise.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares solution of design * coef = rhs via column-pivoting QR.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs);

/// Aitken delta-squared extrapolation of the last three terms; falls back to the last term
/// when the increments do not contract.
double aitken_limit(std::span<const double> sequence);

/// Polynomial of degree <= 2 in n variables: c + g.x + x^T H x / 2.
struct Polynomial {
  double constant = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;

  int dim() const { return static_cast<int>(gradient.size()); }
  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient_at(const Eigen::VectorXd& x) const;

  static Polynomial zero(int n);
  static Polynomial affine(const Eigen::VectorXd& gradient, double constant);
};

/// Least-squares fit of an affine (degree 1) or quadratic (degree 2) polynomial to
/// scattered samples.
Polynomial fit_polynomial(const std::vector<Eigen::VectorXd>& points, std::span<const double> values, int degree);

}  // namespace farfield
