#include "farfield/fundamental_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "farfield/errors.hpp"
#include "farfield/fd_solver.hpp"
#include "farfield/fitting.hpp"
#include "farfield/io.hpp"
#include "farfield/radial_scheme.hpp"

namespace farfield {

ScalingExponents scaling_exponents(const Ellipticity& e) {
  ScalingExponents s;
  s.alpha_plus = (e.dim() - 1) * e.lower() / e.upper() - 1.0;
  s.alpha_minus = (e.dim() - 1) * e.upper() / e.lower() - 1.0;
  return s;
}

DecayCase decay_case(const Ellipticity& e) {
  const double n1 = e.dim() - 1;
  const double ratio = e.ratio();
  if (std::abs(ratio - n1) <= 1e-12 * n1) return DecayCase::Logarithmic;
  return ratio > n1 ? DecayCase::Growing : DecayCase::Decaying;
}

std::string to_string(DecayCase c) {
  switch (c) {
    case DecayCase::Growing:
      return "alpha_plus_negative";
    case DecayCase::Logarithmic:
      return "alpha_plus_zero";
    case DecayCase::Decaying:
      return "alpha_plus_positive";
  }
  return "unknown";
}

RadialTail RadialTail::power(double exponent, double sign) { return RadialTail(false, exponent, sign); }
RadialTail RadialTail::logarithmic(double sign) { return RadialTail(true, 0.0, sign); }

RadialTail RadialTail::upward(double alpha) {
  if (alpha == 0.0) return logarithmic(-1.0);
  return power(-alpha, alpha > 0.0 ? 1.0 : -1.0);
}

namespace {

void require_positive(double r) {
  if (!(r > 0.0)) throw InvalidInput("fundamental solution evaluated at r <= 0");
}

}  // namespace

double RadialTail::value(double r) const {
  require_positive(r);
  return logarithmic_ ? sign_ * std::log(r) : sign_ * std::pow(r, exponent_);
}

double RadialTail::derivative(double r) const {
  require_positive(r);
  return logarithmic_ ? sign_ / r : sign_ * exponent_ * std::pow(r, exponent_ - 1.0);
}

double RadialTail::second_derivative(double r) const {
  require_positive(r);
  return logarithmic_ ? -sign_ / (r * r) : sign_ * exponent_ * (exponent_ - 1.0) * std::pow(r, exponent_ - 2.0);
}

RadialTail RadialTail::negated() const { return RadialTail(logarithmic_, exponent_, -sign_); }

namespace {

/// E+ (side Plus) or E- (side Minus).
RadialTail upward_pucci(PucciSide side, const Ellipticity& e) {
  const double n1 = e.dim() - 1;
  if (side == PucciSide::Plus) {
    const double p = 1.0 - n1 * e.lower() / e.upper();
    switch (decay_case(e)) {
      case DecayCase::Decaying:
        return RadialTail::power(p, 1.0);
      case DecayCase::Logarithmic:
        return RadialTail::logarithmic(-1.0);
      case DecayCase::Growing:
        return RadialTail::power(p, -1.0);
    }
  }
  if (e.lower() == e.upper() && e.dim() == 2) return RadialTail::logarithmic(-1.0);
  return RadialTail::power(1.0 - n1 * e.upper() / e.lower(), 1.0);
}

}  // namespace

FundamentalSolution::FundamentalSolution(PucciSide side, Orientation orientation, const Ellipticity& e)
    : side_(side),
      orientation_(orientation),
      ellipticity_(e),
      tail_(orientation == Orientation::Upward
                ? upward_pucci(side, e)
                : upward_pucci(side == PucciSide::Plus ? PucciSide::Minus : PucciSide::Plus, e).negated()) {}

double FundamentalSolution::eval(double r) const { return tail_.value(r); }
double FundamentalSolution::derivative(double r) const { return tail_.derivative(r); }
double FundamentalSolution::second_derivative(double r) const { return tail_.second_derivative(r); }

OperatorSpec FundamentalSolution::solved_operator() const {
  return side_ == PucciSide::Plus ? OperatorSpec::pucci_plus(ellipticity_) : OperatorSpec::pucci_minus(ellipticity_);
}

double radial_residual(const OperatorSpec& f, const RadialDerivativeFn& u, double r) {
  if (!f.is_rotation_invariant()) throw InvalidConfiguration("radial_residual: operator is not rotation invariant");
  const RadialDerivatives d = u(r);
  return f.evaluate(radial_hessian_spectrum(d.du, d.ddu, r, f.dim()).as_matrix());
}

double radial_residual(const OperatorSpec& f, const RadialTail& u, double r) {
  return radial_residual(f, [&](double s) { return RadialDerivatives{u.derivative(s), u.second_derivative(s)}; }, r);
}

Normalization normalize_upward(std::span<const double> samples, double alpha_star) {
  if (samples.empty()) throw InvalidInput("normalize_upward: no samples");
  Normalization out;
  if (alpha_star == 0.0) {
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    out.kind = Normalization::Kind::Shift;
    out.value = -mean;
    return out;
  }
  const double sgn = alpha_star > 0.0 ? 1.0 : -1.0;
  double m = std::numeric_limits<double>::infinity();
  for (double v : samples) m = std::min(m, sgn * v);
  if (!(m > 0.0)) throw InvalidInput("normalize_upward: no positive scale normalizes these samples");
  out.kind = Normalization::Kind::Scale;
  out.value = 1.0 / m;
  return out;
}

double rotation_invariant_exponent(const OperatorSpec& f) {
  if (!f.is_rotation_invariant() || !f.is_positively_homogeneous()) {
    throw InvalidConfiguration("rotation_invariant_exponent: need a rotation-invariant 1-homogeneous operator");
  }
  const int n = f.dim();
  const Ellipticity& e = f.ellipticity();
  auto g = [&](double kappa) {
    std::vector<double> d(n, -1.0);
    d[0] = kappa;
    return f.evaluate(SymMatrix::diagonal(d));
  };
  // g is increasing with slope at least lambda; g(0) < 0 < g(hi).
  double lo = 0.0, hi = (n - 1) * e.upper() / e.lower() + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi) - 1.0;
  return std::abs(alpha) < 1e-12 ? 0.0 : alpha;
}

RadialTail upward_tail(const OperatorSpec& f) { return RadialTail::upward(rotation_invariant_exponent(f)); }

namespace {

double fit_rss(const std::vector<double>& basis, const std::vector<double>& u) {
  Eigen::MatrixXd a(u.size(), 2);
  Eigen::VectorXd b(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = basis[i];
    b(i) = u[i];
  }
  const Eigen::VectorXd c = least_squares(a, b);
  return (a * c - b).squaredNorm();
}

ExponentFit fit_one(const OperatorSpec& f, double far, const ExponentEstimateOptions& o) {
  const double h = std::min(o.spacing, radial_mesh_limit(f.ellipticity(), 1.0));
  const int nodes = std::max(3, static_cast<int>(std::ceil((far - 1.0) / h)) + 1);
  const RadialGrid grid(1.0, far, nodes);
  DirichletProblem p{f, grid, 0.0, {}, {}};
  p.boundary_values.assign(nodes, 0.0);
  p.boundary_values.front() = 1.0;
  const Solution s = solve_radial(p);
  const auto& u = s.u.values();

  std::vector<double> logr, logdu, radii, vals;
  const double outer = far * o.fit_outer_fraction;
  for (int i = 1; i + 1 < nodes; ++i) {
    const double r = grid.radius(i);
    if (r < o.fit_inner || r > outer) continue;
    const double du = (u[i + 1] - u[i - 1]) / (2.0 * grid.spacing());
    if (du == 0.0) continue;
    logr.push_back(std::log(r));
    logdu.push_back(std::log(std::abs(du)));
    radii.push_back(r);
    vals.push_back(u[i]);
  }
  if (logr.size() < 3) throw InvalidConfiguration("estimate_scaling_exponent: fit window holds too few nodes");
  const LineFit line = fit_line(logr, logdu);
  ExponentFit fit;
  fit.far_radius = far;
  fit.alpha = -1.0 - line.slope;
  fit.r2 = line.r2;

  std::vector<double> pow_basis(radii.size()), log_basis(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    pow_basis[i] = std::abs(fit.alpha) > 1e-8 ? std::pow(radii[i], -fit.alpha) : std::log(radii[i]);
    log_basis[i] = std::log(radii[i]);
  }
  const double rss_pow = fit_rss(pow_basis, vals);
  const double rss_log = fit_rss(log_basis, vals);
  fit.logarithmic = rss_log <= o.log_preference * rss_pow;
  if (fit.logarithmic) fit.alpha = 0.0;
  return fit;
}

}  // namespace

ExponentEstimate estimate_scaling_exponent(const OperatorSpec& f, const ExponentEstimateOptions& options) {
  if (!f.is_rotation_invariant()) throw InvalidConfiguration("estimate_scaling_exponent: operator is not rotation invariant");
  if (!f.is_positively_homogeneous()) throw InvalidConfiguration("estimate_scaling_exponent: operator is not 1-homogeneous");
  if (options.far_radii.empty()) throw InvalidInput("estimate_scaling_exponent: empty radius schedule");

  ExponentEstimate est;
  std::vector<double> alphas;
  est.fit_r2 = 1.0;
  for (double far : options.far_radii) {
    const ExponentFit fit = fit_one(f, far, options);
    est.per_radius.push_back(fit);
    alphas.push_back(fit.alpha);
    est.fit_r2 = std::min(est.fit_r2, fit.r2);
    if (fit.r2 < options.min_r2) est.flagged = true;
  }
  est.alpha_hat = aitken_limit(alphas);
  est.logarithmic = est.per_radius.back().logarithmic;
  est.half_width = std::abs(est.alpha_hat - alphas.back());
  if (alphas.size() > 1) est.half_width = std::max(est.half_width, std::abs(alphas.back() - alphas[alphas.size() - 2]));
  return est;
}

std::string exponent_csv(const std::vector<ExponentRow>& rows) {
  CsvTable t;
  t.schema = "exponents";
  t.columns = {"lambda", "Lambda", "n", "alpha_plus", "alpha_minus", "alpha_star_hat", "fit_r2"};
  for (const auto& r : rows) {
    t.rows.push_back({r.lambda, r.Lambda, static_cast<double>(r.n), r.alpha_plus, r.alpha_minus, r.alpha_star_hat,
                      r.fit_r2});
  }
  return t.to_string();
}

}  // namespace farfield
