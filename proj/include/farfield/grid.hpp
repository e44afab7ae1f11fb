#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace farfield {

/// Uniform radial nodes r_i = r_in + i h, i = 0..nodes-1. r_in = 0 makes it a ball whose
/// first node is the center.
class RadialGrid {
 public:
  RadialGrid(double r_in, double r_out, int nodes);

  double r_in() const noexcept { return r_in_; }
  double r_out() const noexcept { return r_out_; }
  int nodes() const noexcept { return nodes_; }
  double spacing() const noexcept { return h_; }
  double radius(int i) const noexcept { return i == nodes_ - 1 ? r_out_ : r_in_ + i * h_; }
  bool includes_center() const noexcept { return r_in_ == 0.0; }
  /// Index of the node nearest to r, clamped to the grid.
  int nearest(double r) const;

 private:
  double r_in_;
  double r_out_;
  int nodes_;
  double h_;
};

/// Barycentric P1 weights of a point in the triangulated polar mesh.
struct Barycentric {
  std::array<int, 3> nodes{};
  std::array<double, 3> weights{};
};

/// End of a clipped ray: distance travelled and the interpolation weights there.
struct RayHit {
  double distance = 0.0;
  bool clipped = false;
  Barycentric at;
};

/// Polar grid on an annulus or a disc. Rings j = 0..radial_nodes-1 at radius r_in + j h with
/// angular_nodes equispaced angles. A disc (r_in = 0) collapses ring 0 to one center node.
///
/// Each cell between consecutive rings is split into two triangles, so the mesh covers the
/// region between the inner and outer chord polygons and P1 interpolation on it is exact
/// for affine functions.
class PolarGrid {
 public:
  PolarGrid(double r_in, double r_out, int radial_nodes, int angular_nodes);

  double r_in() const noexcept { return r_in_; }
  double r_out() const noexcept { return r_out_; }
  int radial_nodes() const noexcept { return radial_nodes_; }
  int angular_nodes() const noexcept { return angular_nodes_; }
  double spacing() const noexcept { return h_; }
  double dtheta() const noexcept { return dtheta_; }
  bool includes_center() const noexcept { return r_in_ == 0.0; }
  int node_count() const noexcept;

  double ring_radius(int j) const noexcept { return j == radial_nodes_ - 1 ? r_out_ : r_in_ + j * h_; }
  double angle(int l) const noexcept { return l * dtheta_; }
  /// Node index of ring j, angle l (l taken modulo angular_nodes).
  int index(int j, int l) const noexcept;
  int ring_of(int k) const noexcept;
  int angle_index_of(int k) const noexcept;
  Eigen::Vector2d point(int k) const;
  bool is_boundary(int k) const noexcept;
  int nearest_ring(double r) const;

  /// P1 weights for x, or nullopt outside the triangulated region.
  std::optional<Barycentric> locate(const Eigen::Vector2d& x) const;

  /// Walks from x along unit direction e for distance s, stopping early where the segment
  /// leaves the mesh through the outer polygon or enters the inner hole.
  RayHit clip_ray(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s) const;

 private:
  std::optional<Barycentric> locate_in_cell(const Eigen::Vector2d& x, int j, int l) const;
  /// Exit distance along the ray from the outer polygon (infinity when it stays inside).
  double outer_exit(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s, int& edge) const;
  double hole_entry(const Eigen::Vector2d& x, const Eigen::Vector2d& e, double s, int& edge) const;
  Barycentric on_edge(int ring, int edge, const Eigen::Vector2d& p) const;

  double r_in_;
  double r_out_;
  int radial_nodes_;
  int angular_nodes_;
  double h_;
  double dtheta_;
};

/// Quasi-uniform unit directions in R^n used to sample spheres of radial functions.
std::vector<Eigen::VectorXd> sphere_directions(int n, int count);

/// Values, gradients and Hessians on one sphere of a grid function.
struct SphereData {
  double radius = 0.0;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;
  std::vector<Eigen::VectorXd> gradients;
  std::vector<Eigen::MatrixXd> hessians;
};

/// Scalar field on a radial or polar grid. A radial function carries the dimension n of the
/// space it lives in; polar functions are planar.
class GridFunction {
 public:
  GridFunction(const RadialGrid& grid, int dim, std::vector<double> values);
  GridFunction(const PolarGrid& grid, std::vector<double> values);

  static GridFunction sample(const RadialGrid& grid, int dim, const std::function<double(double)>& f);
  static GridFunction sample(const PolarGrid& grid, const std::function<double(const Eigen::Vector2d&)>& f);

  bool is_radial() const noexcept { return std::holds_alternative<RadialGrid>(grid_); }
  const RadialGrid& radial_grid() const { return std::get<RadialGrid>(grid_); }
  const PolarGrid& polar_grid() const { return std::get<PolarGrid>(grid_); }
  int dim() const noexcept { return dim_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double r_min() const;
  double r_max() const;
  /// Radial spacing of the underlying grid.
  double spacing() const;

  /// Piecewise-linear (P1 for polar) value; throws InvalidInput outside the grid.
  double value_at(const Eigen::VectorXd& x) const;
  /// Cubic Lagrange value (tensor cubic in r and periodic cubic in theta for polar).
  double cubic_at(const Eigen::VectorXd& x) const;
  /// Central-difference gradient of the piecewise-linear interpolant with step h.
  Eigen::VectorXd gradient_at(const Eigen::VectorXd& x, double h) const;

  /// Samples the circle (polar) or the radius (radial) at the given angles with cubic
  /// interpolation; err_estimate receives max |cubic - linear| over the samples.
  std::vector<double> sample_circle(double r, const std::vector<double>& angles, double* err_estimate = nullptr) const;

  /// Nodal data on grid sphere `ring`. Radial functions use `directions` sample directions.
  SphereData sphere(int ring, int directions = 64) const;
  int ring_count() const;
  double ring_radius(int ring) const;
  int nearest_ring(double r) const;

  /// Node coordinates and values with |x| <= radius (radial functions are spread over
  /// `directions` directions).
  void nodes_within(double radius, int directions, std::vector<Eigen::VectorXd>& points, std::vector<double>& values) const;

  /// Returns a copy with g(x) added nodewise. Radial functions evaluate g on the first axis,
  /// so g should itself be radial there.
  GridFunction plus(const std::function<double(const Eigen::VectorXd&)>& g) const;

  /// Columnar CSV: coordinates then value, with a versioned header comment.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::variant<RadialGrid, PolarGrid> grid_;
  int dim_;
  std::vector<double> values_;
};

}  // namespace farfield
