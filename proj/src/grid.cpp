#include "farfield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "farfield/errors.hpp"
#include "farfield/io.hpp"

namespace farfield {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

/// Lagrange weights at x for nodes xs (size 1..4).
void lagrange(const double* xs, int count, double x, double* w) {
  for (int i = 0; i < count; ++i) {
    double v = 1.0;
    for (int k = 0; k < count; ++k) {
      if (k != i) v *= (x - xs[k]) / (xs[i] - xs[k]);
    }
    w[i] = v;
  }
}

/// First index of a 4-point (or smaller) window around continuous index q on [0, n).
int window_start(double q, int n, int width) {
  int start = static_cast<int>(std::floor(q)) - (width / 2 - 1);
  return std::clamp(start, 0, n - width);
}

}  // namespace

RadialGrid::RadialGrid(double r_in, double r_out, int nodes) : r_in_(r_in), r_out_(r_out), nodes_(nodes) {
  if (!(r_in >= 0.0) || !(r_out > r_in) || !std::isfinite(r_out)) {
    throw InvalidInput("RadialGrid: need 0 <= r_in < r_out < inf");
  }
  if (nodes < 3) throw InvalidInput("RadialGrid: need at least 3 nodes");
  h_ = (r_out - r_in) / (nodes - 1);
}

int RadialGrid::nearest(double r) const {
  const int i = static_cast<int>(std::lround((r - r_in_) / h_));
  return std::clamp(i, 0, nodes_ - 1);
}

PolarGrid::PolarGrid(double r_in, double r_out, int radial_nodes, int angular_nodes)
    : r_in_(r_in), r_out_(r_out), radial_nodes_(radial_nodes), angular_nodes_(angular_nodes) {
  if (!(r_in >= 0.0) || !(r_out > r_in) || !std::isfinite(r_out)) {
    throw InvalidInput("PolarGrid: need 0 <= r_in < r_out < inf");
  }
  if (radial_nodes < 3) throw InvalidInput("PolarGrid: need at least 3 radial nodes");
  if (angular_nodes < 8 || angular_nodes % 2 != 0) {
    throw InvalidInput("PolarGrid: angular nodes must be even and at least 8");
  }
  h_ = (r_out - r_in) / (radial_nodes - 1);
  dtheta_ = kTwoPi / angular_nodes;
}

int PolarGrid::node_count() const noexcept {
  return includes_center() ? 1 + (radial_nodes_ - 1) * angular_nodes_ : radial_nodes_ * angular_nodes_;
}

int PolarGrid::index(int j, int l) const noexcept {
  l %= angular_nodes_;
  if (l < 0) l += angular_nodes_;
  if (includes_center()) return j == 0 ? 0 : 1 + (j - 1) * angular_nodes_ + l;
  return j * angular_nodes_ + l;
}

int PolarGrid::ring_of(int k) const noexcept {
  if (includes_center()) return k == 0 ? 0 : 1 + (k - 1) / angular_nodes_;
  return k / angular_nodes_;
}

int PolarGrid::angle_index_of(int k) const noexcept {
  if (includes_center()) return k == 0 ? 0 : (k - 1) % angular_nodes_;
  return k % angular_nodes_;
}

Eigen::Vector2d PolarGrid::point(int k) const {
  const double r = ring_radius(ring_of(k));
  const double t = angle(angle_index_of(k));
  return {r * std::cos(t), r * std::sin(t)};
}

bool PolarGrid::is_boundary(int k) const noexcept {
  const int j = ring_of(k);
  return j == radial_nodes_ - 1 || (!includes_center() && j == 0);
}

int PolarGrid::nearest_ring(double r) const {
  const int j = static_cast<int>(std::lround((r - r_in_) / h_));
  return std::clamp(j, 0, radial_nodes_ - 1);
}

std::optional<Barycentric> PolarGrid::locate_in_cell(const Eigen::Vector2d& x, int j, int l) const {
  if (j < 0 || j >= radial_nodes_ - 1) return std::nullopt;
  constexpr double tol = 1e-11;
  auto try_triangle = [&](int a, int b, int c) -> std::optional<Barycentric> {
    const Eigen::Vector2d pa = point(a), pb = point(b), pc = point(c);
    const double det = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (det == 0.0) return std::nullopt;
    const Eigen::Vector2d d = x - pa;
    const double wb = (d.x() * (pc - pa).y() - d.y() * (pc - pa).x()) / det;
    const double wc = ((pb - pa).x() * d.y() - (pb - pa).y() * d.x()) / det;
    const double wa = 1.0 - wb - wc;
    if (wa < -tol || wb < -tol || wc < -tol) return std::nullopt;
    Barycentric out;
    out.nodes = {a, b, c};
    out.weights = {std::max(wa, 0.0), std::max(wb, 0.0), std::max(wc, 0.0)};
    const double sum = out.weights[0] + out.weights[1] + out.weights[2];
    for (double& w : out.weights) w /= sum;
    return out;
  };
  const int b = index(j + 1, l), c = index(j + 1, l + 1);
  if (includes_center() && j == 0) return try_triangle(0, b, c);
  const int a = index(j, l), d = index(j, l + 1);
  if (auto t = try_triangle(a, b, c)) return t;
  return try_triangle(a, c, d);
}

std::optional<Barycentric> PolarGrid::locate(const Eigen::Vector2d& x) const {
  const double rho = x.norm();
  if (rho > r_out_ * (1.0 + 1e-12)) return std::nullopt;
  if (rho < r_in_ * std::cos(0.5 * dtheta_) * (1.0 - 1e-12)) return std::nullopt;
  const double theta = wrap_angle(std::atan2(x.y(), x.x()));
  const int l0 = std::min(static_cast<int>(theta / dtheta_), angular_nodes_ - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor((rho - r_in_) / h_)), 0, radial_nodes_ - 2);
  for (int dl : {0, -1, 1}) {
    for (int dj : {0, -1, 1}) {
      if (auto b = locate_in_cell(x, j0 + dj, l0 + dl)) return b;
    }
  }
  return std::nullopt;
}

double PolarGrid::outer_exit(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s, int& edge) const {
  const double support = r_out_ * std::cos(0.5 * dtheta_);
  if ((x + s * e).norm() < support * (1.0 - 1e-12) && x.norm() < support) return kInf;
  double best = kInf;
  for (int l = 0; l < angular_nodes_; ++l) {
    const double phi = (l + 0.5) * dtheta_;
    const Eigen::Vector2d nrm(std::cos(phi), std::sin(phi));
    const double ne = nrm.dot(e);
    if (ne <= 0.0) continue;
    const double t = (support - nrm.dot(x)) / ne;
    if (t < best) {
      best = t;
      edge = l;
    }
  }
  return std::max(best, 0.0);
}

double PolarGrid::hole_entry(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s, int& edge) const {
  if (includes_center()) return kInf;
  // Closest approach of the segment to the origin decides whether the hole can be hit.
  const double tc = std::clamp(-x.dot(e), 0.0, s);
  if ((x + tc * e).norm() > r_in_ * (1.0 + 1e-12)) return kInf;
  const double support = r_in_ * std::cos(0.5 * dtheta_);
  double t_enter = -kInf, t_exit = kInf;
  int enter_edge = -1;
  for (int l = 0; l < angular_nodes_; ++l) {
    const double phi = (l + 0.5) * dtheta_;
    const Eigen::Vector2d nrm(std::cos(phi), std::sin(phi));
    const double ne = nrm.dot(e);
    const double dist = support - nrm.dot(x);
    if (ne == 0.0) {
      if (dist < 0.0) return kInf;
      continue;
    }
    const double t = dist / ne;
    if (ne < 0.0) {
      if (t > t_enter) {
        t_enter = t;
        enter_edge = l;
      }
    } else {
      t_exit = std::min(t_exit, t);
    }
  }
  if (enter_edge < 0 || t_enter > t_exit || t_enter < 0.0 || t_enter > s) return kInf;
  edge = enter_edge;
  return t_enter;
}

Barycentric PolarGrid::on_edge(int ring, int edge, const Eigen::Vector2d& p) const {
  const int a = index(ring, edge), b = index(ring, edge + 1);
  const Eigen::Vector2d pa = point(a), pb = point(b);
  const double tau = std::clamp((p - pa).dot(pb - pa) / (pb - pa).squaredNorm(), 0.0, 1.0);
  Barycentric out;
  out.nodes = {a, b, b};
  out.weights = {1.0 - tau, tau, 0.0};
  return out;
}

RayHit PolarGrid::clip_ray(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s) const {
  int out_edge = -1, in_edge = -1;
  const double t_out = outer_exit(x, e, s, out_edge);
  const double t_in = hole_entry(x, e, s, in_edge);
  RayHit hit;
  if (t_out < s && t_out <= t_in) {
    hit.distance = t_out;
    hit.clipped = true;
    hit.at = on_edge(radial_nodes_ - 1, out_edge, x + t_out * e);
    return hit;
  }
  if (t_in < s) {
    hit.distance = t_in;
    hit.clipped = true;
    hit.at = on_edge(0, in_edge, x + t_in * e);
    return hit;
  }
  hit.distance = s;
  if (auto b = locate(x + s * e)) {
    hit.at = *b;
    return hit;
  }
  // Roundoff placed the endpoint a hair outside; pull it back.
  if (auto b = locate(x + s * (1.0 - 1e-9) * e)) {
    hit.distance = s * (1.0 - 1e-9);
    hit.at = *b;
    return hit;
  }
  throw InvalidInput("PolarGrid::clip_ray: endpoint could not be located");
}

std::vector<Eigen::VectorXd> sphere_directions(int n, int count) {
  if (n < 2) throw InvalidInput("sphere_directions: dimension must be at least 2");
  std::vector<Eigen::VectorXd> dirs;
  if (n == 2) {
    const int m = std::max(count, 4);
    for (int k = 0; k < m; ++k) {
      const double t = kTwoPi * k / m;
      Eigen::VectorXd d(2);
      d << std::cos(t), std::sin(t);
      dirs.push_back(d);
    }
    return dirs;
  }
  for (int i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d(i) = sgn;
      dirs.push_back(d);
    }
  }
  const int extra = std::max(count - 2 * n, 0);
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < extra; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / extra;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      Eigen::VectorXd d(3);
      d << rho * std::cos(golden * k), rho * std::sin(golden * k), z;
      dirs.push_back(d);
    }
    return dirs;
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < extra; ++k) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
    dirs.push_back(d.normalized());
  }
  return dirs;
}

GridFunction::GridFunction(const RadialGrid& grid, int dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim < 2) throw InvalidInput("GridFunction: dimension must be at least 2");
  if (static_cast<int>(values_.size()) != grid.nodes()) throw InvalidInput("GridFunction: value count mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("GridFunction: non-finite value");
  }
}

GridFunction::GridFunction(const PolarGrid& grid, std::vector<double> values)
    : grid_(grid), dim_(2), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid.node_count()) throw InvalidInput("GridFunction: value count mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("GridFunction: non-finite value");
  }
}

GridFunction GridFunction::sample(const RadialGrid& grid, int dim, const std::function<double(double)>& f) {
  std::vector<double> v(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) v[i] = f(grid.radius(i));
  return GridFunction(grid, dim, std::move(v));
}

GridFunction GridFunction::sample(const PolarGrid& grid, const std::function<double(const Eigen::Vector2d&)>& f) {
  std::vector<double> v(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) v[k] = f(grid.point(k));
  return GridFunction(grid, std::move(v));
}

double GridFunction::r_min() const { return is_radial() ? radial_grid().r_in() : polar_grid().r_in(); }
double GridFunction::r_max() const { return is_radial() ? radial_grid().r_out() : polar_grid().r_out(); }
double GridFunction::spacing() const { return is_radial() ? radial_grid().spacing() : polar_grid().spacing(); }

int GridFunction::ring_count() const {
  return is_radial() ? radial_grid().nodes() : polar_grid().radial_nodes();
}

double GridFunction::ring_radius(int ring) const {
  return is_radial() ? radial_grid().radius(ring) : polar_grid().ring_radius(ring);
}

int GridFunction::nearest_ring(double r) const {
  return is_radial() ? radial_grid().nearest(r) : polar_grid().nearest_ring(r);
}

double GridFunction::value_at(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw InvalidInput("GridFunction::value_at: dimension mismatch");
  if (is_radial()) {
    const RadialGrid& g = radial_grid();
    const double r = x.norm();
    const double tol = 1e-12 * std::max(1.0, g.r_out());
    if (r < g.r_in() - tol || r > g.r_out() + tol) throw InvalidInput("GridFunction::value_at: radius outside grid");
    const double q = std::clamp((r - g.r_in()) / g.spacing(), 0.0, static_cast<double>(g.nodes() - 1));
    const int i = std::min(static_cast<int>(q), g.nodes() - 2);
    const double t = q - i;
    return (1.0 - t) * values_[i] + t * values_[i + 1];
  }
  const auto b = polar_grid().locate(Eigen::Vector2d(x(0), x(1)));
  if (!b) throw InvalidInput("GridFunction::value_at: point outside grid");
  return b->weights[0] * values_[b->nodes[0]] + b->weights[1] * values_[b->nodes[1]] +
         b->weights[2] * values_[b->nodes[2]];
}

Eigen::VectorXd GridFunction::gradient_at(const Eigen::VectorXd& x, double h) const {
  Eigen::VectorXd g(dim_);
  for (int i = 0; i < dim_; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (value_at(xp) - value_at(xm)) / (2.0 * h);
  }
  return g;
}

namespace {

/// Cubic interpolation of ring `j` of a polar function at angle theta (periodic).
double ring_cubic(const PolarGrid& g, const std::vector<double>& v, int j, double theta, bool linear) {
  if (g.includes_center() && j == 0) return v[0];
  const double q = wrap_angle(theta) / g.dtheta();
  const int l0 = static_cast<int>(std::floor(q));
  if (linear) {
    const double t = q - l0;
    return (1.0 - t) * v[g.index(j, l0)] + t * v[g.index(j, l0 + 1)];
  }
  const double xs[4] = {-1.0, 0.0, 1.0, 2.0};
  double w[4];
  lagrange(xs, 4, q - l0, w);
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += w[k] * v[g.index(j, l0 - 1 + k)];
  return s;
}

double radial_interp(const std::vector<double>& radii, const std::function<double(int)>& value, double r, int width) {
  const int n = static_cast<int>(radii.size());
  width = std::min(width, n);
  const double h = radii[1] - radii[0];
  const int start = window_start((r - radii[0]) / h, n, width);
  double xs[4], w[4];
  for (int k = 0; k < width; ++k) xs[k] = radii[start + k];
  lagrange(xs, width, r, w);
  double s = 0.0;
  for (int k = 0; k < width; ++k) s += w[k] * value(start + k);
  return s;
}

}  // namespace

double GridFunction::cubic_at(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw InvalidInput("GridFunction::cubic_at: dimension mismatch");
  const double r = x.norm();
  const double tol = 1e-12 * std::max(1.0, r_max());
  if (r < r_min() - tol || r > r_max() + tol) throw InvalidInput("GridFunction::cubic_at: radius outside grid");
  std::vector<double> radii(ring_count());
  for (int j = 0; j < ring_count(); ++j) radii[j] = ring_radius(j);
  if (is_radial()) {
    return radial_interp(radii, [&](int i) { return values_[i]; }, r, 4);
  }
  const double theta = std::atan2(x(1), x(0));
  const PolarGrid& g = polar_grid();
  return radial_interp(radii, [&](int j) { return ring_cubic(g, values_, j, theta, false); }, r, 4);
}

std::vector<double> GridFunction::sample_circle(double r, const std::vector<double>& angles, double* err_estimate) const {
  const double tol = 1e-12 * std::max(1.0, r_max());
  if (r < r_min() - tol || r > r_max() + tol) throw InvalidInput("sample_circle: radius outside grid");
  std::vector<double> radii(ring_count());
  for (int j = 0; j < ring_count(); ++j) radii[j] = ring_radius(j);
  std::vector<double> out(angles.size());
  double err = 0.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    double cubic = 0.0, linear = 0.0;
    if (is_radial()) {
      cubic = radial_interp(radii, [&](int i) { return values_[i]; }, r, 4);
      linear = radial_interp(radii, [&](int i) { return values_[i]; }, r, 2);
    } else {
      const PolarGrid& g = polar_grid();
      cubic = radial_interp(radii, [&](int j) { return ring_cubic(g, values_, j, angles[k], false); }, r, 4);
      linear = radial_interp(radii, [&](int j) { return ring_cubic(g, values_, j, angles[k], true); }, r, 2);
    }
    out[k] = cubic;
    err = std::max(err, std::abs(cubic - linear));
  }
  if (err_estimate) *err_estimate = err;
  return out;
}

namespace {

/// First and second derivative along a uniform line of values at index i (one-sided at ends).
void line_derivatives(const std::vector<double>& f, double h, int i, double& d1, double& d2) {
  const int n = static_cast<int>(f.size());
  if (i > 0 && i < n - 1) {
    d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
  } else if (i == 0) {
    d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d2 = (f[0] - 2.0 * f[1] + f[2]) / (h * h);
  } else {
    d1 = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d2 = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / (h * h);
  }
}

}  // namespace

SphereData GridFunction::sphere(int ring, int directions) const {
  if (ring < 0 || ring >= ring_count()) throw InvalidInput("GridFunction::sphere: ring out of range");
  SphereData s;
  s.radius = ring_radius(ring);
  if (is_radial()) {
    const RadialGrid& g = radial_grid();
    double d1 = 0.0, d2 = 0.0;
    if (g.includes_center() && ring == 0) {
      d2 = 2.0 * (values_[1] - values_[0]) / (g.spacing() * g.spacing());
    } else {
      line_derivatives(values_, g.spacing(), ring, d1, d2);
    }
    const double tang = ring == 0 && g.includes_center() ? d2 : d1 / s.radius;
    for (const auto& d : sphere_directions(dim_, directions)) {
      s.points.push_back(s.radius * d);
      s.values.push_back(values_[ring]);
      s.gradients.push_back(d1 * d);
      const Eigen::MatrixXd dd = d * d.transpose();
      s.hessians.push_back(d2 * dd + tang * (Eigen::MatrixXd::Identity(dim_, dim_) - dd));
    }
    return s;
  }

  const PolarGrid& g = polar_grid();
  if (g.includes_center() && ring == 0) {
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    s.points.push_back(x);
    s.values.push_back(values_[0]);
    s.gradients.push_back(gradient_at(x, g.spacing()));
    Eigen::MatrixXd hess(2, 2);
    const double h = g.spacing();
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(2);
      ei(i) = h;
      hess(i, i) = (value_at(ei) - 2.0 * values_[0] + value_at(-ei)) / (h * h);
    }
    Eigen::VectorXd pp(2), pm(2);
    pp << h, h;
    pm << h, -h;
    hess(0, 1) = hess(1, 0) = (value_at(pp) + value_at(-pp) - value_at(pm) - value_at(-pm)) / (4.0 * h * h);
    s.hessians.push_back(hess);
    return s;
  }

  const int nt = g.angular_nodes();
  const int nr = g.radial_nodes();
  const double h = g.spacing(), dt = g.dtheta(), r = s.radius;
  std::vector<double> line(nr);
  std::vector<double> theta_line(nr);
  for (int l = 0; l < nt; ++l) {
    for (int j = 0; j < nr; ++j) {
      line[j] = values_[g.index(j, l)];
      const double up = values_[g.index(j, l + 1)], dn = values_[g.index(j, l - 1)];
      theta_line[j] = (g.includes_center() && j == 0) ? 0.0 : (up - dn) / (2.0 * dt);
    }
    double ur = 0.0, urr = 0.0, urt = 0.0, unused = 0.0;
    line_derivatives(line, h, ring, ur, urr);
    line_derivatives(theta_line, h, ring, urt, unused);
    const double u = values_[g.index(ring, l)];
    const double ut = theta_line[ring];
    const double utt = (values_[g.index(ring, l + 1)] - 2.0 * u + values_[g.index(ring, l - 1)]) / (dt * dt);
    const double t = g.angle(l);
    Eigen::VectorXd er(2), et(2);
    er << std::cos(t), std::sin(t);
    et << -std::sin(t), std::cos(t);
    s.points.push_back(r * er);
    s.values.push_back(u);
    s.gradients.push_back(ur * er + (ut / r) * et);
    const double hrr = urr, htt = ur / r + utt / (r * r), hrt = urt / r - ut / (r * r);
    s.hessians.push_back(hrr * er * er.transpose() + htt * et * et.transpose() +
                         hrt * (er * et.transpose() + et * er.transpose()));
  }
  return s;
}

void GridFunction::nodes_within(double radius, int directions, std::vector<Eigen::VectorXd>& points,
                                std::vector<double>& values) const {
  points.clear();
  values.clear();
  const double lim = radius * (1.0 + 1e-12);
  if (is_radial()) {
    const RadialGrid& g = radial_grid();
    const auto dirs = sphere_directions(dim_, directions);
    for (int i = 0; i < g.nodes(); ++i) {
      const double r = g.radius(i);
      if (r > lim) break;
      if (r == 0.0) {
        points.push_back(Eigen::VectorXd::Zero(dim_));
        values.push_back(values_[i]);
        continue;
      }
      for (const auto& d : dirs) {
        points.push_back(r * d);
        values.push_back(values_[i]);
      }
    }
    return;
  }
  const PolarGrid& g = polar_grid();
  for (int k = 0; k < g.node_count(); ++k) {
    if (g.ring_radius(g.ring_of(k)) > lim) continue;
    const Eigen::Vector2d p = g.point(k);
    points.push_back(Eigen::VectorXd(p));
    values.push_back(values_[k]);
  }
}

GridFunction GridFunction::plus(const std::function<double(const Eigen::VectorXd&)>& f) const {
  std::vector<double> v = values_;
  if (is_radial()) {
    const RadialGrid& g = radial_grid();
    for (int i = 0; i < g.nodes(); ++i) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_);
      x(0) = g.radius(i);
      v[i] += f(x);
    }
    return GridFunction(g, dim_, std::move(v));
  }
  const PolarGrid& g = polar_grid();
  for (int k = 0; k < g.node_count(); ++k) v[k] += f(Eigen::VectorXd(g.point(k)));
  return GridFunction(g, std::move(v));
}

std::string GridFunction::to_csv() const {
  CsvTable t;
  t.schema = "grid_function";
  if (is_radial()) {
    t.columns = {"r", "value"};
    const RadialGrid& g = radial_grid();
    for (int i = 0; i < g.nodes(); ++i) t.rows.push_back({g.radius(i), values_[i]});
  } else {
    t.columns = {"x", "y", "value"};
    const PolarGrid& g = polar_grid();
    for (int k = 0; k < g.node_count(); ++k) {
      const Eigen::Vector2d p = g.point(k);
      t.rows.push_back({p.x(), p.y(), values_[k]});
    }
  }
  return t.to_string();
}

void GridFunction::write_csv(const std::filesystem::path& path) const { write_text_atomic(path, to_csv()); }

}  // namespace farfield
