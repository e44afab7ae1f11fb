#include "farfield/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "farfield/errors.hpp"
#include "farfield/io.hpp"

namespace farfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Calls fn(x, u(x)) on every node of u; radial nodes are spread over sample directions.
template <class Fn>
void for_each_sample(const GridFunction& u, int directions, Fn&& fn) {
  if (u.is_radial()) {
    const auto dirs = sphere_directions(u.dim(), directions);
    for (int j = 0; j < u.ring_count(); ++j) {
      const double r = u.ring_radius(j);
      for (const auto& d : dirs) fn(Eigen::VectorXd(r * d), u.values()[j]);
    }
    return;
  }
  const PolarGrid& g = u.polar_grid();
  for (int k = 0; k < g.node_count(); ++k) fn(Eigen::VectorXd(g.point(k)), u.values()[k]);
}

void validate(const GridFunction& u, const OperatorSpec& f, double rhs, int growth_power, const ExtractionOptions& o) {
  if (f.dim() != u.dim()) throw InvalidInput("extraction: operator and data dimensions differ");
  if (std::abs(f.evaluate(SymMatrix::zero(f.dim()))) > 1e-12) {
    throw InvalidConfiguration("extraction: operator does not satisfy F(0) = 0");
  }
  if (!std::isfinite(rhs)) throw InvalidInput("extraction: non-finite right-hand side");
  if (u.r_min() > 1.0 + 1e-9) throw InvalidInput("extraction: exterior data must reach the unit sphere");
  if (o.schedule.empty()) throw InvalidInput("extraction: empty schedule");
  for (std::size_t i = 0; i < o.schedule.size(); ++i) {
    if (!(o.schedule[i] > 1.0)) throw InvalidInput("extraction: scheduled radii must exceed 1");
    if (i > 0 && !(o.schedule[i] > o.schedule[i - 1])) throw InvalidInput("extraction: schedule must be increasing");
  }
  if (o.schedule.back() > u.r_max() * (1.0 + 1e-12)) throw InvalidInput("extraction: schedule exceeds the exterior data");
  for_each_sample(u, 1, [&](const Eigen::VectorXd& x, double v) {
    if (!std::isfinite(v)) throw InvalidInput("extraction: non-finite exterior data");
    if (std::abs(v) > o.growth_bound * (1.0 + std::pow(x.norm(), growth_power))) {
      throw InvalidInput("extraction: exterior data violates the growth bound");
    }
  });
}

double profile_delta(const Polynomial& a, const Polynomial& b, bool quadratic) {
  double d = (a.gradient - b.gradient).cwiseAbs().maxCoeff();
  if (quadratic) d = std::max(d, (a.hessian - b.hessian).cwiseAbs().maxCoeff());
  return d;
}

/// Runs the ball sequence and returns the last fit together with the chosen branch constant.
Polynomial run_sequence(const GridFunction& u, const OperatorSpec& f, double rhs, bool quadratic,
                        const ExtractionOptions& o, ExtractionTrace& trace) {
  const double fit_radius = o.fit_radius > 0.0 ? o.fit_radius : (quadratic ? 4.0 : 2.0);
  if (fit_radius > o.schedule.front()) throw InvalidInput("extraction: fit ball must lie inside the first ball");

  const SphereData unit = u.sphere(u.nearest_ring(1.0), o.directions);
  int below = 0;
  for (double radius : o.schedule) {
    const BallSolution ball = solve_ball_sequence(u, f, rhs, {radius}, o.ball).front();
    const GridFunction& v = ball.solution.u;
    ExtractionStep step;
    step.radius = radius;
    step.report = ball.solution.report;
    step.a = -kInf;
    step.b = kInf;
    for (std::size_t k = 0; k < unit.points.size(); ++k) {
      const double d = v.value_at(unit.points[k]) - unit.values[k];
      if (d > step.a) {
        step.a = d;
        step.touching_point = unit.points[k];
      }
      step.b = std::min(step.b, d);
    }

    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    v.nodes_within(fit_radius, o.directions, pts, vals);
    if (quadratic) {
      step.touching_gradient = v.gradient_at(step.touching_point, v.spacing());
      std::vector<double> w(vals.size());
      for (std::size_t k = 0; k < vals.size(); ++k) {
        w[k] = vals[k] - step.touching_gradient.dot(pts[k] - step.touching_point);
      }
      step.fit = fit_polynomial(pts, w, 2);
      step.fit.gradient += step.touching_gradient;
      step.fit.constant -= step.touching_gradient.dot(step.touching_point);
      const double g = step.touching_gradient.norm();
      trace.max_touching_gradient = std::max(trace.max_touching_gradient, g);
      if (g > o.gradient_bound) trace.gradient_bounded = false;
    } else {
      step.fit = fit_polynomial(pts, vals, 1);
    }
    for (std::size_t k = 0; k < vals.size(); ++k) {
      step.fit_residual = std::max(step.fit_residual, std::abs(step.fit(pts[k]) - vals[k]));
    }
    step.delta = trace.steps.empty() ? kInf : profile_delta(step.fit, trace.steps.back().fit, quadratic);
    below = step.delta < o.tolerance ? below + 1 : 0;
    trace.steps.push_back(step);
    if (below >= 2) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged) {
    throw ExtractionError(ExtractionError::Kind::NotConverged, "extraction: schedule exhausted before the profile settled",
                          trace);
  }

  const ExtractionStep& last = trace.steps.back();
  double scale = 1.0;
  for (double v : unit.values) scale = std::max(scale, std::abs(v));
  trace.slack = 2.0 * std::max(last.fit_residual, last.report.interpolation_error) + o.slack_floor * scale;

  Polynomial upper = last.fit, lower = last.fit;
  upper.constant -= last.a;
  lower.constant -= last.b;
  double c_max = kInf, c_min = kInf;
  for_each_sample(u, o.directions, [&](const Eigen::VectorXd& x, double v) {
    c_max = std::min(c_max, v - upper(x));
    c_min = std::min(c_min, lower(x) - v);
  });
  if (c_max >= -trace.slack) {
    trace.branch = "max";
    trace.certificate = c_max;
    return upper;
  }
  if (c_min >= -trace.slack) {
    trace.branch = "min";
    trace.certificate = c_min;
    return lower;
  }
  trace.certificate = std::max(c_max, c_min);
  throw ExtractionError(ExtractionError::Kind::CertificateViolated,
                        "extraction: neither one-sided certificate holds within the slack", trace);
}

/// Intercept of the better fit of far sphere means of u - L against {1, phi} or {1, -phi_tilde}
/// with a positive coefficient; NaN when neither qualifies.
double tail_intercept(const GridFunction& u, const Polynomial& linear_part, const OperatorSpec& f) {
  if (!f.is_rotation_invariant() || !f.is_positively_homogeneous()) return std::numeric_limits<double>::quiet_NaN();
  const RadialTail phi = upward_tail(f);
  const RadialTail down = upward_tail(f.dual()).negated();
  std::vector<double> r, m;
  for (int ring : dyadic_rings(u, 2.0)) {
    const SphereDeviation d = sphere_deviation(u, linear_part, ring);
    r.push_back(d.radius);
    m.push_back(d.mean());
  }
  if (r.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  double best_rss = kInf, best = std::numeric_limits<double>::quiet_NaN();
  for (const RadialTail* t : {&phi, &down}) {
    Eigen::MatrixXd a(r.size(), 2);
    Eigen::VectorXd b(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = t->value(r[i]);
      b(i) = m[i];
    }
    const Eigen::VectorXd c = least_squares(a, b);
    const double rss = (a * c - b).squaredNorm();
    if (c(1) > 0.0 && rss < best_rss) {
      best_rss = rss;
      best = c(0);
    }
  }
  return best;
}

}  // namespace

Polynomial QuadraticProfile::polynomial() const {
  Polynomial p;
  p.constant = constant;
  p.gradient = gradient;
  p.hessian = hessian;
  return p;
}

std::string ExtractionTrace::to_json() const {
  nlohmann::ordered_json j;
  j["branch"] = branch;
  j["converged"] = converged;
  j["slack"] = slack;
  j["certificate"] = num(certificate);
  j["max_touching_gradient"] = max_touching_gradient;
  j["gradient_bounded"] = gradient_bounded;
  j["normalization"] = normalization;
  j["normalization_shift"] = normalization_shift;
  auto& rows = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : steps) {
    nlohmann::ordered_json row;
    row["radius"] = s.radius;
    row["a"] = s.a;
    row["b"] = s.b;
    row["touching_point"] = to_vec(s.touching_point);
    row["gradient"] = to_vec(s.fit.gradient);
    row["fit_residual"] = s.fit_residual;
    row["delta"] = num(s.delta);
    row["iterations"] = s.report.iterations;
    row["residual"] = s.report.residual;
    row["interpolation_error"] = s.report.interpolation_error;
    rows.push_back(row);
  }
  return j.dump(2);
}

LinearExtraction extract_linear_profile(const GridFunction& u, const OperatorSpec& f, const ExtractionOptions& options) {
  validate(u, f, 0.0, 1, options);
  LinearExtraction out;
  Polynomial p = run_sequence(u, f, 0.0, false, options, out.trace);

  out.trace.limit = estimate_limit_at_infinity(u, p);
  if (out.trace.limit.finite()) {
    out.trace.normalization = "limit";
    out.trace.normalization_shift = out.trace.limit.value;
  } else if (out.trace.limit.kind != LimitKind::Inconclusive) {
    const double c = tail_intercept(u, Polynomial::affine(p.gradient, 0.0), f);
    if (std::isfinite(c)) {
      out.trace.normalization = "intercept";
      out.trace.normalization_shift = c - p.constant;
    }
  }
  out.profile.gradient = p.gradient;
  out.profile.constant = p.constant + out.trace.normalization_shift;
  return out;
}

QuadraticExtraction extract_quadratic_profile(const GridFunction& u, const OperatorSpec& f, double rhs,
                                              const ExtractionOptions& options) {
  validate(u, f, rhs, 2, options);
  QuadraticExtraction out;
  Polynomial p = run_sequence(u, f, rhs, true, options, out.trace);

  out.trace.limit = estimate_limit_at_infinity(u, p);
  if (out.trace.limit.finite()) {
    out.trace.normalization = "limit";
    out.trace.normalization_shift = out.trace.limit.value;
  }
  out.profile.hessian = 0.5 * (p.hessian + p.hessian.transpose());
  out.profile.gradient = p.gradient;
  out.profile.constant = p.constant + out.trace.normalization_shift;
  out.profile.operator_value = f.evaluate(SymMatrix(out.profile.hessian));
  if (std::abs(out.profile.operator_value - rhs) > options.constraint_tolerance) {
    throw ExtractionError(ExtractionError::Kind::ConstraintViolated,
                          "extraction: F(D^2 P) misses the right-hand side beyond tolerance", out.trace);
  }
  return out;
}

}  // namespace farfield
