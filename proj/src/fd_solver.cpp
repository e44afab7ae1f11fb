#include "farfield/fd_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "farfield/errors.hpp"
#include "farfield/polar_scheme.hpp"
#include "farfield/radial_scheme.hpp"

namespace farfield {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

OperatorSpec effective_operator(const DirichletProblem& p) {
  return p.rhs == 0.0 ? p.op : OperatorSpec::with_rhs(p.op, p.rhs);
}

Eigen::VectorXd axis_point(int dim, double r) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  x(0) = r;
  return x;
}

SolveReport report_from(const HowardResult& h, Clock::time_point start) {
  SolveReport r;
  r.iterations = h.iterations;
  r.residual = h.residual;
  r.policy_switches = h.policy_switches;
  r.wall_ms = elapsed_ms(start);
  return r;
}

}  // namespace

std::string SolveReport::to_json() const {
  nlohmann::ordered_json j;
  j["iterations"] = iterations;
  j["residual"] = residual;
  j["policy_switches"] = policy_switches;
  j["wall_ms"] = wall_ms;
  return j.dump(2);
}

Solution solve_radial(const DirichletProblem& p, const SolveOptions& options) {
  const auto start = Clock::now();
  if (!std::holds_alternative<RadialGrid>(p.domain)) throw InvalidInput("solve_radial: domain is not a RadialGrid");
  const RadialGrid& grid = std::get<RadialGrid>(p.domain);
  const int n = p.op.dim();
  double inner = 0.0, outer = 0.0;
  if (!p.boundary_values.empty()) {
    if (static_cast<int>(p.boundary_values.size()) != grid.nodes()) {
      throw InvalidInput("solve_radial: boundary vector must have one entry per node");
    }
    inner = p.boundary_values.front();
    outer = p.boundary_values.back();
  } else {
    if (!p.boundary) throw InvalidInput("solve_radial: no boundary data");
    if (!grid.includes_center()) inner = p.boundary(axis_point(n, grid.r_in()));
    outer = p.boundary(axis_point(n, grid.r_out()));
  }
  if (!std::isfinite(inner) || !std::isfinite(outer)) throw InvalidInput("solve_radial: non-finite boundary data");
  const RadialScheme scheme(effective_operator(p), grid, inner, outer);
  const HowardResult h = howard_solve(scheme, options.howard);
  return Solution{GridFunction(grid, n, h.u), report_from(h, start)};
}

Solution solve_polar(const DirichletProblem& p, const SolveOptions& options) {
  const auto start = Clock::now();
  if (!std::holds_alternative<PolarGrid>(p.domain)) throw InvalidInput("solve_polar: domain is not a PolarGrid");
  if (p.op.dim() != 2) throw InvalidConfiguration("solve_polar: operator dimension must be 2");
  if (options.frames < 4) throw InvalidConfiguration("solve_polar: need at least 4 frames");
  const PolarGrid& grid = std::get<PolarGrid>(p.domain);
  std::vector<double> values = p.boundary_values;
  if (values.empty()) {
    if (!p.boundary) throw InvalidInput("solve_polar: no boundary data");
    values.assign(grid.node_count(), 0.0);
    for (int k = 0; k < grid.node_count(); ++k) {
      if (grid.is_boundary(k)) values[k] = p.boundary(Eigen::VectorXd(grid.point(k)));
    }
  }
  if (static_cast<int>(values.size()) != grid.node_count()) {
    throw InvalidInput("solve_polar: boundary vector must have one entry per node");
  }
  for (int k = 0; k < grid.node_count(); ++k) {
    if (grid.is_boundary(k) && !std::isfinite(values[k])) throw InvalidInput("solve_polar: non-finite boundary data");
  }
  const PolarScheme scheme(effective_operator(p), grid, std::move(values), options.frames);
  const HowardResult h = howard_solve(scheme, options.howard);
  return Solution{GridFunction(grid, h.u), report_from(h, start)};
}

Solution solve(const DirichletProblem& p, const SolveOptions& options) {
  return std::holds_alternative<RadialGrid>(p.domain) ? solve_radial(p, options) : solve_polar(p, options);
}

namespace {

/// Boundary node coordinates of a domain (radial: inner and outer radius on the first axis).
std::vector<Eigen::VectorXd> boundary_points(const DirichletProblem& p) {
  std::vector<Eigen::VectorXd> pts;
  if (std::holds_alternative<RadialGrid>(p.domain)) {
    const RadialGrid& g = std::get<RadialGrid>(p.domain);
    if (!g.includes_center()) pts.push_back(axis_point(p.op.dim(), g.r_in()));
    pts.push_back(axis_point(p.op.dim(), g.r_out()));
    return pts;
  }
  const PolarGrid& g = std::get<PolarGrid>(p.domain);
  for (int k = 0; k < g.node_count(); ++k) {
    if (g.is_boundary(k)) pts.push_back(Eigen::VectorXd(g.point(k)));
  }
  return pts;
}

}  // namespace

ComparisonReport discrete_comparison_check(const DirichletProblem& p, const BoundaryFn& f, const BoundaryFn& g,
                                           const SolveOptions& options) {
  for (const auto& x : boundary_points(p)) {
    if (f(x) > g(x)) throw InvalidInput("discrete_comparison_check: boundary data not ordered");
  }
  DirichletProblem pf = p, pg = p;
  pf.boundary = f;
  pf.boundary_values.clear();
  pg.boundary = g;
  pg.boundary_values.clear();
  const Solution uf = solve(pf, options);
  const Solution ug = solve(pg, options);
  ComparisonReport report;
  report.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < uf.u.values().size(); ++k) {
    report.worst = std::max(report.worst, uf.u.values()[k] - ug.u.values()[k]);
  }
  report.pass = report.worst <= 1e-12;
  return report;
}

std::vector<ConvergenceRow> convergence_study(const DirichletProblem& p, const BoundaryFn& exact, int levels,
                                              const SolveOptions& options) {
  if (levels < 1) throw InvalidInput("convergence_study: need at least one level");
  std::vector<ConvergenceRow> rows;
  for (int level = 0; level < levels; ++level) {
    DirichletProblem q = p;
    q.boundary_values.clear();
    if (!q.boundary) q.boundary = exact;
    const int factor = 1 << level;
    double err = 0.0;
    double spacing = 0.0;
    if (std::holds_alternative<RadialGrid>(p.domain)) {
      const RadialGrid& g0 = std::get<RadialGrid>(p.domain);
      const RadialGrid g(g0.r_in(), g0.r_out(), (g0.nodes() - 1) * factor + 1);
      q.domain = g;
      const Solution s = solve_radial(q, options);
      for (int i = 0; i < g.nodes(); ++i) {
        err = std::max(err, std::abs(s.u.values()[i] - exact(axis_point(p.op.dim(), g.radius(i)))));
      }
      spacing = g.spacing();
    } else {
      const PolarGrid& g0 = std::get<PolarGrid>(p.domain);
      const PolarGrid g(g0.r_in(), g0.r_out(), (g0.radial_nodes() - 1) * factor + 1, g0.angular_nodes() * factor);
      q.domain = g;
      const Solution s = solve_polar(q, options);
      for (int k = 0; k < g.node_count(); ++k) {
        err = std::max(err, std::abs(s.u.values()[k] - exact(Eigen::VectorXd(g.point(k)))));
      }
      spacing = g.spacing();
    }
    ConvergenceRow row;
    row.level = level;
    row.spacing = spacing;
    row.sup_error = err;
    row.order = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : std::log2(rows.back().sup_error / err);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BallSolution> solve_ball_sequence(const GridFunction& exterior, const OperatorSpec& f, double rhs,
                                              const std::vector<double>& schedule, const BallOptions& options) {
  if (schedule.empty()) throw InvalidInput("solve_ball_sequence: empty schedule");
  if (f.dim() != exterior.dim()) throw InvalidInput("solve_ball_sequence: operator and data dimensions differ");
  const double tol = 1e-12 * std::max(1.0, exterior.r_max());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0 && !(schedule[i] > schedule[i - 1])) {
      throw InvalidInput("solve_ball_sequence: schedule must be strictly increasing");
    }
    if (schedule[i] > exterior.r_max() + tol || schedule[i] < exterior.r_min() - tol) {
      throw InvalidInput("solve_ball_sequence: schedule radius outside the exterior data");
    }
  }

  std::vector<BallSolution> out;
  for (double radius : schedule) {
    DirichletProblem p{f, RadialGrid(0.0, 1.0, 3), rhs, {}, {}};
    double err = 0.0;
    Solution s{GridFunction(RadialGrid(0.0, 1.0, 3), 2, {0.0, 0.0, 0.0}), {}};
    if (exterior.is_radial()) {
      const RadialGrid g(0.0, radius, options.radial_nodes);
      p.domain = g;
      const double value = exterior.sample_circle(radius, {0.0}, &err).front();
      p.boundary_values.assign(g.nodes(), value);
      s = solve_radial(p, options.solve);
    } else {
      const PolarGrid g(0.0, radius, options.polar_radial_nodes, options.polar_angular_nodes);
      p.domain = g;
      std::vector<double> angles(g.angular_nodes());
      for (int l = 0; l < g.angular_nodes(); ++l) angles[l] = g.angle(l);
      const std::vector<double> ring = exterior.sample_circle(radius, angles, &err);
      p.boundary_values.assign(g.node_count(), 0.0);
      for (int l = 0; l < g.angular_nodes(); ++l) p.boundary_values[g.index(g.radial_nodes() - 1, l)] = ring[l];
      s = solve_polar(p, options.solve);
    }
    s.report.interpolation_error = err;
    out.push_back(BallSolution{radius, std::move(s)});
  }
  return out;
}

}  // namespace farfield
