#include "farfield/policy_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "farfield/errors.hpp"

namespace farfield {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

Sense flip(Sense s) { return s == Sense::Max ? Sense::Min : Sense::Max; }

double select(Sense s, double acc, double v) { return s == Sense::Max ? std::max(acc, v) : std::min(acc, v); }

double initial(Sense s) {
  return s == Sense::Max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
}

void add_radial_pucci(RadialForm& form, const Ellipticity& e) {
  const double n1 = e.dim() - 1;
  for (double a : {e.lower(), e.upper()}) {
    for (double b : {e.lower(), e.upper()}) form.policies.push_back({a, n1 * b, 0.0});
  }
}

PlanarPolicy frame_policy(double angle, bool relative, double w_first, double w_second) {
  PlanarPolicy p;
  if (w_first == w_second) {
    p.terms = {{0.0, true, w_first}, {kHalfPi, true, w_first}};
  } else {
    p.terms = {{angle, relative, w_first}, {angle + kHalfPi, relative, w_second}};
  }
  return p;
}

void add_frame_pair(PlanarForm& form, int frames, double lo, double hi) {
  for (int k = 0; k < frames; ++k) {
    const double phi = k * kHalfPi / frames;
    form.policies.push_back(frame_policy(phi, true, hi, lo));
    form.policies.push_back(frame_policy(phi, true, lo, hi));
  }
}

}  // namespace

double RadialForm::policy_value(const RadialPolicy& p, double ddu, double tangential) const {
  return p.radial * (ddu + offset) + p.tangential * (tangential + offset) + p.constant;
}

double RadialForm::evaluate(double ddu, double tangential) const {
  double acc = initial(sense);
  for (const auto& p : policies) acc = select(sense, acc, policy_value(p, ddu, tangential));
  return acc;
}

RadialForm radial_form(const OperatorSpec& f) {
  if (!f.is_rotation_invariant()) throw InvalidConfiguration("radial_form: operator is not rotation invariant");
  RadialForm form;
  const Ellipticity& e = f.ellipticity();
  const double n1 = e.dim() - 1;
  switch (f.kind()) {
    case OperatorKind::PucciPlus:
      form.sense = Sense::Max;
      add_radial_pucci(form, e);
      return form;
    case OperatorKind::PucciMinus:
      form.sense = Sense::Min;
      add_radial_pucci(form, e);
      return form;
    case OperatorKind::Laplace:
      form.policies.push_back({1.0, n1, 0.0});
      return form;
    case OperatorKind::Bellman:
      form.sense = Sense::Max;
      for (const auto& a : f.controls()) {
        const Eigen::VectorXd mu = a.eigenvalues();
        const double total = mu.sum();
        if (f.control_set() == ControlSet::Fixed) {
          // Rotation invariance forces every fixed control to be scalar.
          form.policies.push_back({mu(0), n1 * mu(0), 0.0});
        } else {
          form.policies.push_back({mu(0), total - mu(0), 0.0});
          form.policies.push_back({mu(mu.size() - 1), total - mu(mu.size() - 1), 0.0});
        }
      }
      return form;
    case OperatorKind::Shifted: {
      RadialForm inner = radial_form(*f.base());
      inner.offset += f.offset()(0, 0);
      for (auto& p : inner.policies) p.constant -= f.shift();
      return inner;
    }
    case OperatorKind::Dual: {
      RadialForm inner = radial_form(*f.base());
      inner.sense = flip(inner.sense);
      inner.offset = -inner.offset;
      for (auto& p : inner.policies) p.constant = -p.constant;
      return inner;
    }
  }
  throw InvalidConfiguration("radial_form: unknown operator kind");
}

double PlanarForm::policy_value(const PlanarPolicy& p, const Eigen::Matrix2d& m, double radial_angle) const {
  const Eigen::Matrix2d mo = m + offset;
  double v = p.constant;
  for (const auto& t : p.terms) {
    const double a = t.relative ? radial_angle + t.angle : t.angle;
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    v += t.weight * e.dot(mo * e);
  }
  return v;
}

double PlanarForm::evaluate(const Eigen::Matrix2d& m, double radial_angle) const {
  double acc = initial(sense);
  for (const auto& p : policies) acc = select(sense, acc, policy_value(p, m, radial_angle));
  return acc;
}

PlanarForm planar_form(const OperatorSpec& f, int frames) {
  if (f.dim() != 2) throw InvalidConfiguration("planar_form: operator dimension must be 2");
  if (frames < 1) throw InvalidConfiguration("planar_form: need at least one frame");
  PlanarForm form;
  const Ellipticity& e = f.ellipticity();
  switch (f.kind()) {
    case OperatorKind::PucciPlus:
    case OperatorKind::PucciMinus:
      form.sense = f.kind() == OperatorKind::PucciPlus ? Sense::Max : Sense::Min;
      form.policies.push_back(frame_policy(0.0, true, e.lower(), e.lower()));
      form.policies.push_back(frame_policy(0.0, true, e.upper(), e.upper()));
      if (e.lower() != e.upper()) add_frame_pair(form, frames, e.lower(), e.upper());
      return form;
    case OperatorKind::Laplace:
      form.policies.push_back(frame_policy(0.0, true, 1.0, 1.0));
      return form;
    case OperatorKind::Bellman:
      form.sense = Sense::Max;
      for (const auto& a : f.controls()) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix());
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
        if (a.is_scalar()) {
          form.policies.push_back(frame_policy(0.0, true, lo, lo));
        } else if (f.control_set() == ControlSet::RotationClosed) {
          add_frame_pair(form, frames, lo, hi);
        } else {
          const Eigen::Vector2d v = es.eigenvectors().col(0);
          form.policies.push_back(frame_policy(std::atan2(v.y(), v.x()), false, lo, hi));
        }
      }
      return form;
    case OperatorKind::Shifted: {
      PlanarForm inner = planar_form(*f.base(), frames);
      inner.offset += f.offset().matrix();
      for (auto& p : inner.policies) p.constant -= f.shift();
      return inner;
    }
    case OperatorKind::Dual: {
      PlanarForm inner = planar_form(*f.base(), frames);
      inner.sense = flip(inner.sense);
      inner.offset = -inner.offset;
      for (auto& p : inner.policies) p.constant = -p.constant;
      return inner;
    }
  }
  throw InvalidConfiguration("planar_form: unknown operator kind");
}

}  // namespace farfield
