#include "farfield/polar_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "farfield/errors.hpp"
#include "farfield/radial_scheme.hpp"

namespace farfield {

namespace {

constexpr double kPi = std::numbers::pi;

double mod_pi(double a) {
  double t = std::fmod(a, kPi);
  if (t < 0.0) t += kPi;
  if (kPi - t < 1e-12) t = 0.0;
  return t;
}

void merge(std::vector<std::pair<int, double>>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (out > 0 && entries[out - 1].first == entries[k].first) {
      entries[out - 1].second += entries[k].second;
    } else {
      entries[out++] = entries[k];
    }
  }
  entries.resize(out);
}

}  // namespace

PolarScheme::PolarScheme(const OperatorSpec& f, const PolarGrid& grid, std::vector<double> boundary_values, int frames)
    : form_(planar_form(f, frames)), grid_(grid), boundary_(std::move(boundary_values)) {
  if (static_cast<int>(boundary_.size()) != grid.node_count()) {
    throw InvalidInput("PolarScheme: boundary vector must have one entry per node");
  }
  const double limit = radial_mesh_limit(f.ellipticity(), grid.r_in());
  if (grid.spacing() > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "polar mesh condition violated: h = " << grid.spacing() << " > " << limit;
    throw InvalidConfiguration(msg.str());
  }
  const double h = grid.spacing();
  width_ = h * std::ceil(1.0 / std::sqrt(h) - 1e-12);
  width_ = std::max(width_, h);

  radial_key_ = key_index(0.0, true);
  tangential_key_ = key_index(kPi / 2, true);
  for (const auto& p : form_.policies) {
    std::vector<Term> terms;
    double rad = 0.0, tan = 0.0;
    for (const auto& t : p.terms) {
      if (!(t.weight > 0.0)) throw InvalidConfiguration("polar scheme: operator has a non-elliptic policy");
      const int k = key_index(t.angle, t.relative);
      terms.push_back({k, t.weight});
      if (k == radial_key_) rad += t.weight;
      if (k == tangential_key_) tan += t.weight;
    }
    terms_.push_back(std::move(terms));
    radial_weight_.push_back(rad);
    tangential_weight_.push_back(tan);
  }

  const int slots = static_cast<int>(keys_.size()) + 1;
  spans_.assign(static_cast<std::size_t>(grid.node_count()) * slots, Span{});
  for (int i = 0; i < grid.node_count(); ++i) {
    if (!grid.is_boundary(i)) build_node(i);
  }
}

int PolarScheme::key_index(double angle, bool relative) {
  const double a = mod_pi(angle);
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    if (keys_[k].relative == relative && std::abs(keys_[k].angle - a) < 1e-12) return static_cast<int>(k);
  }
  keys_.push_back({a, relative});
  return static_cast<int>(keys_.size()) - 1;
}

void PolarScheme::add_stencil(std::vector<std::pair<int, double>>& entries) {
  merge(entries);
  for (const auto& [k, w] : entries) {
    idx_.push_back(k);
    w_.push_back(w);
  }
}

void PolarScheme::build_wide(int node, double angle, double s) {
  const Eigen::Vector2d x = grid_.point(node);
  const Eigen::Vector2d e(std::cos(angle), std::sin(angle));
  const RayHit plus = grid_.clip_ray(x, e, s);
  const RayHit minus = grid_.clip_ray(x, -e, s);
  const double sp = plus.distance, sm = minus.distance;
  const double c = 2.0 / (sp * sm * (sp + sm));
  std::vector<std::pair<int, double>> entries;
  for (int k = 0; k < 3; ++k) {
    if (plus.at.weights[k] != 0.0) entries.emplace_back(plus.at.nodes[k], c * sm * plus.at.weights[k]);
    if (minus.at.weights[k] != 0.0) entries.emplace_back(minus.at.nodes[k], c * sp * minus.at.weights[k]);
  }
  entries.emplace_back(node, -c * (sp + sm));
  add_stencil(entries);
}

void PolarScheme::build_node(int node) {
  const int slots = static_cast<int>(keys_.size()) + 1;
  const int j = grid_.ring_of(node);
  const int l = grid_.angle_index_of(node);
  const double theta = grid_.angle(l);
  const double h = grid_.spacing();
  const bool center = grid_.includes_center() && j == 0;
  const double r = grid_.ring_radius(j);

  for (int k = 0; k < slots; ++k) {
    Span& span = spans_[static_cast<std::size_t>(node) * slots + k];
    span.begin = static_cast<int>(idx_.size());
    if (center) {
      if (k < slots - 1) build_wide(node, keys_[k].angle, h);
    } else if (k == radial_key_) {
      std::vector<std::pair<int, double>> e{
          {grid_.index(j + 1, l), 1.0 / (h * h)}, {node, -2.0 / (h * h)}, {grid_.index(j - 1, l), 1.0 / (h * h)}};
      add_stencil(e);
    } else if (k == tangential_key_ || k == slots - 1) {
      const double ang = 1.0 / (r * r * 2.0 * (1.0 - std::cos(grid_.dtheta())));
      std::vector<std::pair<int, double>> e{
          {grid_.index(j, l + 1), ang}, {grid_.index(j, l - 1), ang}, {node, -2.0 * ang}};
      if (k == tangential_key_) {
        e.emplace_back(grid_.index(j + 1, l), 1.0 / (2.0 * h * r));
        e.emplace_back(grid_.index(j - 1, l), -1.0 / (2.0 * h * r));
      } else {
        e.emplace_back(grid_.index(j + 1, l), 1.0 / (h * r));
        e.emplace_back(node, -1.0 / (h * r));
      }
      add_stencil(e);
    } else {
      const double a = keys_[k].relative ? theta + keys_[k].angle : keys_[k].angle;
      build_wide(node, a, width_);
    }
    span.end = static_cast<int>(idx_.size());
  }
}

bool PolarScheme::tangential_central(int node, int policy) const {
  const int j = grid_.ring_of(node);
  if (grid_.includes_center() && j == 0) return true;
  const double h = grid_.spacing(), r = grid_.ring_radius(j);
  return radial_weight_[policy] / (h * h) - tangential_weight_[policy] / (2.0 * h * r) >= 0.0;
}

double PolarScheme::offset_term(int node, int key) const {
  if (form_.offset.isZero(0.0)) return 0.0;
  const bool center = grid_.includes_center() && grid_.ring_of(node) == 0;
  const double theta = center ? 0.0 : grid_.angle(grid_.angle_index_of(node));
  const double a = keys_[key].relative ? theta + keys_[key].angle : keys_[key].angle;
  const Eigen::Vector2d e(std::cos(a), std::sin(a));
  return e.dot(form_.offset * e);
}

double PolarScheme::apply(const Span& s, const std::vector<double>& u) const {
  double v = 0.0;
  for (int k = s.begin; k < s.end; ++k) v += w_[k] * u[idx_[k]];
  return v;
}

void PolarScheme::policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const {
  const int slots = static_cast<int>(keys_.size()) + 1;
  const std::size_t base = static_cast<std::size_t>(i) * slots;
  std::vector<double> d(slots);
  for (int k = 0; k < slots; ++k) d[k] = apply(spans_[base + k], u) + (k < slots - 1 ? offset_term(i, k) : 0.0);
  const double forward_tan = d[slots - 1] + offset_term(i, tangential_key_);
  out.resize(form_.policies.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const bool central = tangential_central(i, static_cast<int>(p));
    double v = form_.policies[p].constant;
    for (const auto& t : terms_[p]) v += t.weight * (t.key == tangential_key_ && !central ? forward_tan : d[t.key]);
    out[p] = v;
  }
}

void PolarScheme::policy_row(int i, int policy, LinearRow& row) const {
  const int slots = static_cast<int>(keys_.size()) + 1;
  const std::size_t base = static_cast<std::size_t>(i) * slots;
  const bool central = tangential_central(i, policy);
  row.entries.clear();
  row.constant = form_.policies[policy].constant;
  for (const auto& t : terms_[policy]) {
    const int slot = t.key == tangential_key_ && !central ? slots - 1 : t.key;
    const Span& s = spans_[base + slot];
    for (int k = s.begin; k < s.end; ++k) row.entries.emplace_back(idx_[k], t.weight * w_[k]);
    row.constant += t.weight * offset_term(i, t.key);
  }
  merge(row.entries);
}

}  // namespace farfield
