#include "farfield/radial_scheme.hpp"

#include <limits>
#include <sstream>

#include "farfield/errors.hpp"

namespace farfield {

double radial_mesh_limit(const Ellipticity& e, double r_in) {
  if (r_in <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * r_in * e.lower() / ((e.dim() - 1) * e.upper());
}

RadialScheme::RadialScheme(const OperatorSpec& f, const RadialGrid& grid, double inner_value, double outer_value)
    : form_(radial_form(f)), grid_(grid), inner_(inner_value), outer_(outer_value) {
  const double limit = radial_mesh_limit(f.ellipticity(), grid.r_in());
  if (grid.spacing() > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "radial mesh condition violated: h = " << grid.spacing() << " > " << limit;
    throw InvalidConfiguration(msg.str());
  }
  for (const auto& p : form_.policies) {
    if (p.radial <= 0.0 || p.tangential < 0.0) {
      throw InvalidConfiguration("radial scheme: operator has a non-elliptic policy");
    }
  }
}

bool RadialScheme::is_dirichlet(int i) const {
  return i == grid_.nodes() - 1 || (i == 0 && !grid_.includes_center());
}

double RadialScheme::dirichlet_value(int i) const { return i == 0 ? inner_ : outer_; }

int RadialScheme::policy_count(int) const { return static_cast<int>(form_.policies.size()); }

bool RadialScheme::central_ok(const RadialPolicy& p, double r) const {
  const double h = grid_.spacing();
  return p.radial / (h * h) - p.tangential / (2.0 * h * r) >= 0.0;
}

void RadialScheme::policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const {
  out.resize(form_.policies.size());
  const double h = grid_.spacing();
  if (i == 0) {
    const double l = 2.0 * (u[1] - u[0]) / (h * h);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = form_.policy_value(form_.policies[p], l, l);
    return;
  }
  const double r = grid_.radius(i);
  const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
  const double central = (u[i + 1] - u[i - 1]) / (2.0 * h * r);
  const double forward = (u[i + 1] - u[i]) / (h * r);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const RadialPolicy& pol = form_.policies[p];
    out[p] = form_.policy_value(pol, d2, central_ok(pol, r) ? central : forward);
  }
}

void RadialScheme::policy_row(int i, int policy, LinearRow& row) const {
  const RadialPolicy& p = form_.policies[policy];
  const double h = grid_.spacing();
  row.entries.clear();
  row.constant = p.constant + (p.radial + p.tangential) * form_.offset;
  if (i == 0) {
    const double c = 2.0 * (p.radial + p.tangential) / (h * h);
    row.entries = {{0, -c}, {1, c}};
    return;
  }
  const double r = grid_.radius(i);
  const double a = p.radial / (h * h);
  double lo = a, mid = -2.0 * a, hi = a;
  if (central_ok(p, r)) {
    const double b = p.tangential / (2.0 * h * r);
    lo -= b;
    hi += b;
  } else {
    const double b = p.tangential / (h * r);
    mid -= b;
    hi += b;
  }
  row.entries = {{i - 1, lo}, {i, mid}, {i + 1, hi}};
}

}  // namespace farfield
