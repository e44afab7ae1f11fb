#pragma once

#include <vector>

#include "farfield/grid.hpp"
#include "farfield/howard.hpp"
#include "farfield/operator_core.hpp"
#include "farfield/policy_form.hpp"

namespace farfield {

/// Largest spacing keeping the central radial scheme monotone on an annulus with inner radius
/// r_in: 2 r_in lambda / ((n-1) Lambda).
double radial_mesh_limit(const Ellipticity& e, double r_in);

/// Monotone finite differences for F(D^2 u) = 0 with radial u: u'' by the 3-point stencil and
/// u'/r by central differences. Where a policy would lose monotonicity under central
/// differencing (only possible near the center of a ball) u'/r switches to a forward
/// difference. The center of a ball uses u''(0) ~ 2 (u_1 - u_0) / h^2 for every eigenvalue.
class RadialScheme : public PolicyProblem {
 public:
  /// inner_value is ignored for balls. Throws InvalidConfiguration when the operator is not
  /// rotation invariant or an annulus violates the mesh condition.
  RadialScheme(const OperatorSpec& f, const RadialGrid& grid, double inner_value, double outer_value);

  int size() const override { return grid_.nodes(); }
  Sense sense() const override { return form_.sense; }
  bool is_dirichlet(int i) const override;
  double dirichlet_value(int i) const override;
  int policy_count(int i) const override;
  void policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const override;
  void policy_row(int i, int policy, LinearRow& row) const override;
  bool tridiagonal() const override { return true; }

  const RadialGrid& grid() const noexcept { return grid_; }
  const RadialForm& form() const noexcept { return form_; }

 private:
  bool central_ok(const RadialPolicy& p, double r) const;

  RadialForm form_;
  RadialGrid grid_;
  double inner_;
  double outer_;
};

}  // namespace farfield
