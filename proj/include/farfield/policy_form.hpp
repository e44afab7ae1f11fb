#pragma once

#include <vector>

#include <Eigen/Dense>

#include "farfield/operator_core.hpp"

namespace farfield {

/// Whether the discrete operator takes the max or the min over its policies.
enum class Sense { Max, Min };

/// One affine branch a (u'' + c) + b (u'/r + c) + g of a rotation-invariant operator on the
/// radial Hessian spectrum, where c is the form's scalar offset. b already includes the
/// multiplicity n-1 of the tangential eigenvalue.
struct RadialPolicy {
  double radial = 0.0;
  double tangential = 0.0;
  double constant = 0.0;
};

struct RadialForm {
  Sense sense = Sense::Max;
  double offset = 0.0;
  std::vector<RadialPolicy> policies;

  double policy_value(const RadialPolicy& p, double ddu, double tangential) const;
  /// Max or min over policies.
  double evaluate(double ddu, double tangential) const;
};

/// Exact policy decomposition of F on radial spectra. Throws InvalidConfiguration for an
/// operator that is not rotation invariant.
RadialForm radial_form(const OperatorSpec& f);

/// Weighted directional second derivative. Relative angles are measured from the radial
/// direction at the node; absolute ones from the x axis.
struct PlanarTerm {
  double angle = 0.0;
  bool relative = true;
  double weight = 0.0;
};

/// sum_t w_t e_t^T (M + O) e_t + constant, O being the form's offset.
struct PlanarPolicy {
  std::vector<PlanarTerm> terms;
  double constant = 0.0;
};

struct PlanarForm {
  Sense sense = Sense::Max;
  Eigen::Matrix2d offset = Eigen::Matrix2d::Zero();
  std::vector<PlanarPolicy> policies;

  /// Form value on M at a point whose radial direction has angle radial_angle.
  double evaluate(const Eigen::Matrix2d& m, double radial_angle) const;
  double policy_value(const PlanarPolicy& p, const Eigen::Matrix2d& m, double radial_angle) const;
};

/// Planar policy decomposition. Rotation suprema (Pucci, rotation-closed Bellman) are sampled
/// on `frames` orthogonal frames at angles k pi / (2 frames) from the radial direction;
/// fixed Bellman controls use their own eigenvectors.
PlanarForm planar_form(const OperatorSpec& f, int frames);

}  // namespace farfield
