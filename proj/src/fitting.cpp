#include "farfield/fitting.hpp"

#include <cmath>

#include "farfield/errors.hpp"

namespace farfield {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("fit_line: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InvalidInput("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += e * e;
  }
  fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - fit.rss / syy) : 1.0;
  return fit;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs) {
  return design.colPivHouseholderQr().solve(rhs);
}

double aitken_limit(std::span<const double> s) {
  if (s.empty()) throw InvalidInput("aitken_limit: empty sequence");
  const std::size_t k = s.size();
  if (k < 3) return s[k - 1];
  const double d1 = s[k - 2] - s[k - 3];
  const double d2 = s[k - 1] - s[k - 2];
  const double denom = d2 - d1;
  if (d1 == 0.0 || denom == 0.0) return s[k - 1];
  const double q = d2 / d1;
  if (!(q > 0.0 && q < 1.0)) return s[k - 1];
  return s[k - 1] - d2 * d2 / denom;
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  return constant + gradient.dot(x) + 0.5 * x.dot(hessian * x);
}

Eigen::VectorXd Polynomial::gradient_at(const Eigen::VectorXd& x) const { return gradient + hessian * x; }

Polynomial Polynomial::zero(int n) {
  return Polynomial{0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
}

Polynomial Polynomial::affine(const Eigen::VectorXd& g, double c) {
  return Polynomial{c, g, Eigen::MatrixXd::Zero(g.size(), g.size())};
}

Polynomial fit_polynomial(const std::vector<Eigen::VectorXd>& points, std::span<const double> values, int degree) {
  if (points.empty() || points.size() != values.size()) {
    throw InvalidInput("fit_polynomial: points and values must be nonempty and paired");
  }
  if (degree != 1 && degree != 2) throw InvalidInput("fit_polynomial: degree must be 1 or 2");
  const int n = static_cast<int>(points.front().size());
  const int quad = degree == 2 ? n * (n + 1) / 2 : 0;
  const int cols = 1 + n + quad;
  if (static_cast<int>(points.size()) < cols) throw InvalidInput("fit_polynomial: too few samples");

  Eigen::MatrixXd design(points.size(), cols);
  Eigen::VectorXd rhs(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Eigen::VectorXd& x = points[k];
    design(k, 0) = 1.0;
    for (int i = 0; i < n; ++i) design(k, 1 + i) = x(i);
    int c = 1 + n;
    for (int i = 0; i < n && degree == 2; ++i) {
      for (int j = i; j < n; ++j) design(k, c++) = i == j ? 0.5 * x(i) * x(i) : x(i) * x(j);
    }
    rhs(k) = values[k];
  }
  const Eigen::VectorXd coef = least_squares(design, rhs);

  Polynomial p = Polynomial::zero(n);
  p.constant = coef(0);
  for (int i = 0; i < n; ++i) p.gradient(i) = coef(1 + i);
  int c = 1 + n;
  for (int i = 0; i < n && degree == 2; ++i) {
    for (int j = i; j < n; ++j) {
      p.hessian(i, j) = coef(c);
      p.hessian(j, i) = coef(c);
      ++c;
    }
  }
  return p;
}

}  // namespace farfield
