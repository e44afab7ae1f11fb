#pragma once

#include <vector>

#include "farfield/grid.hpp"
#include "farfield/howard.hpp"
#include "farfield/operator_core.hpp"
#include "farfield/policy_form.hpp"

namespace farfield {

/// Wide-stencil monotone scheme for planar F(D^2 u) = 0 on a polar grid.
///
/// Directional second differences along the radial and tangential directions use on-grid
/// stencils: u_rr by the 3-point rule and u_tt = u_r / r + (angular second difference) /
/// (r^2 2 (1 - cos dtheta)), which is exact on affine functions and on |x|^2. Every other
/// direction uses points at distance s = h ceil(h^{-1/2}) interpolated by P1 on the
/// triangulated mesh; rays that leave the mesh stop at the boundary polygon and the
/// nonuniform 3-point rule is applied. The disc center uses diameters of length h.
class PolarScheme : public PolicyProblem {
 public:
  /// boundary_values holds one entry per node; only boundary entries are read.
  PolarScheme(const OperatorSpec& f, const PolarGrid& grid, std::vector<double> boundary_values, int frames = 8);

  int size() const override { return grid_.node_count(); }
  Sense sense() const override { return form_.sense; }
  bool is_dirichlet(int i) const override { return grid_.is_boundary(i); }
  double dirichlet_value(int i) const override { return boundary_[i]; }
  int policy_count(int) const override { return static_cast<int>(form_.policies.size()); }
  void policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const override;
  void policy_row(int i, int policy, LinearRow& row) const override;

  const PolarGrid& grid() const noexcept { return grid_; }
  const PlanarForm& form() const noexcept { return form_; }
  double stencil_width() const noexcept { return width_; }

 private:
  struct Key {
    double angle;
    bool relative;
  };
  struct Span {
    int begin = 0;
    int end = 0;
  };
  struct Term {
    int key;
    double weight;
  };

  int key_index(double angle, bool relative);
  void add_stencil(std::vector<std::pair<int, double>>& entries);
  void build_wide(int node, double angle, double s);
  void build_node(int node);
  bool tangential_central(int node, int policy) const;
  double offset_term(int node, int key) const;
  double apply(const Span& s, const std::vector<double>& u) const;

  PlanarForm form_;
  PolarGrid grid_;
  std::vector<double> boundary_;
  double width_;
  std::vector<Key> keys_;
  int radial_key_ = -1;
  int tangential_key_ = -1;
  std::vector<std::vector<Term>> terms_;
  /// Radial and tangential weights per policy, used to pick the u_r stencil.
  std::vector<double> radial_weight_;
  std::vector<double> tangential_weight_;
  /// Stencils: node * (keys + 1) + key, the extra slot being the forward tangential one.
  std::vector<Span> spans_;
  std::vector<int> idx_;
  std::vector<double> w_;
};

}  // namespace farfield
