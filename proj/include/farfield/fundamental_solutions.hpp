#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "farfield/operator_core.hpp"

namespace farfield {

/// alpha+ = (n-1) lambda / Lambda - 1 and alpha- = (n-1) Lambda / lambda - 1; alpha_star is
/// filled only for an estimated general operator.
struct ScalingExponents {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  std::optional<double> alpha_star;
};

ScalingExponents scaling_exponents(const Ellipticity& e);

/// Sign of alpha+: which of the three decay regimes (E+ growing, logarithmic, decaying)
/// applies. Decided by comparing Lambda/lambda with n-1.
enum class DecayCase { Growing, Logarithmic, Decaying };

DecayCase decay_case(const Ellipticity& e);
std::string to_string(DecayCase c);

/// A radial function sign * r^exponent or sign * ln r.
class RadialTail {
 public:
  static RadialTail power(double exponent, double sign);
  static RadialTail logarithmic(double sign);
  /// The upward-pointing profile with scaling exponent alpha: r^-alpha when alpha > 0,
  /// -ln r when alpha = 0, -r^-alpha when alpha < 0.
  static RadialTail upward(double alpha);

  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;

  bool is_logarithmic() const noexcept { return logarithmic_; }
  double exponent() const noexcept { return exponent_; }
  double sign() const noexcept { return sign_; }
  /// alpha such that Phi(t x) = t^-alpha Phi(x); 0 for the logarithmic branch.
  double scaling_exponent() const noexcept { return logarithmic_ ? 0.0 : -exponent_; }
  /// True when the profile tends to 0 at infinity.
  bool decays() const noexcept { return !logarithmic_ && exponent_ < 0.0; }

  RadialTail negated() const;

 private:
  RadialTail(bool logarithmic, double exponent, double sign)
      : logarithmic_(logarithmic), exponent_(exponent), sign_(sign) {}
  bool logarithmic_;
  double exponent_;
  double sign_;
};

enum class PucciSide { Plus, Minus };
enum class Orientation { Upward, Downward };

/// Closed-form fundamental solutions of the Pucci operators: E+, E- (upward) and
/// e+ = -E-, e- = -E+ (downward). Both orientations of a side solve that side's operator.
class FundamentalSolution {
 public:
  FundamentalSolution(PucciSide side, Orientation orientation, const Ellipticity& e);

  PucciSide side() const noexcept { return side_; }
  Orientation orientation() const noexcept { return orientation_; }
  const Ellipticity& ellipticity() const noexcept { return ellipticity_; }
  const RadialTail& tail() const noexcept { return tail_; }

  /// Throws InvalidInput for r <= 0.
  double eval(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;

  /// The Pucci operator this function solves away from the origin.
  OperatorSpec solved_operator() const;

 private:
  PucciSide side_;
  Orientation orientation_;
  Ellipticity ellipticity_;
  RadialTail tail_;
};

struct RadialDerivatives {
  double du = 0.0;
  double ddu = 0.0;
};

using RadialDerivativeFn = std::function<RadialDerivatives(double r)>;

/// F evaluated on the radial Hessian spectrum of u at radius r. Rejects operators that are
/// not rotation invariant.
double radial_residual(const OperatorSpec& f, const RadialDerivativeFn& u, double r);
double radial_residual(const OperatorSpec& f, const RadialTail& u, double r);

/// Result of normalizing sphere samples of a fundamental solution.
struct Normalization {
  enum class Kind { Scale, Shift };
  Kind kind = Kind::Scale;
  /// Multiplicative scale (alpha* != 0) or additive shift (alpha* = 0).
  double value = 1.0;
};

/// Scale making min(sign(alpha*) * Phi) = 1 on the sampled unit sphere, or, when alpha* = 0,
/// the shift making the equal-weight (trapezoid on a uniform polar grid) sphere average 0.
Normalization normalize_upward(std::span<const double> sphere_samples, double alpha_star);

/// Exact scaling exponent of a rotation-invariant, positively 1-homogeneous operator:
/// alpha* = kappa - 1 where F(diag(kappa, -1, ..., -1)) = 0.
double rotation_invariant_exponent(const OperatorSpec& f);

/// Upward-pointing radial fundamental solution of a rotation-invariant operator.
RadialTail upward_tail(const OperatorSpec& f);

struct ExponentEstimateOptions {
  std::vector<double> far_radii{16.0, 32.0, 64.0, 128.0};
  /// Radial mesh spacing for every solve.
  double spacing = 1.0 / 32.0;
  /// Fit window [fit_inner, far_radius * fit_outer_fraction].
  double fit_inner = 2.0;
  double fit_outer_fraction = 0.25;
  /// Log model wins when its residual is at most this fraction of the power residual.
  double log_preference = 0.8;
  double min_r2 = 0.999;
};

struct ExponentFit {
  double far_radius = 0.0;
  double alpha = 0.0;
  double r2 = 0.0;
  bool logarithmic = false;
};

struct ExponentEstimate {
  double alpha_hat = 0.0;
  /// Half width of the confidence window around alpha_hat.
  double half_width = 0.0;
  double fit_r2 = 0.0;
  bool logarithmic = false;
  /// Fit quality fell below min_r2 somewhere in the schedule.
  bool flagged = false;
  std::vector<ExponentFit> per_radius;
};

/// Solves the radial exterior problem F = 0, u(1) = 1, u(R) = 0 for each far radius and fits
/// the profile to A + B r^-alpha or A + B ln r, then extrapolates the fitted exponents.
ExponentEstimate estimate_scaling_exponent(const OperatorSpec& f, const ExponentEstimateOptions& options = {});

/// One line of an exponent table.
struct ExponentRow {
  double lambda = 0.0;
  double Lambda = 0.0;
  int n = 0;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double alpha_star_hat = 0.0;
  double fit_r2 = 0.0;
};

/// CSV with columns lambda, Lambda, n, alpha_plus, alpha_minus, alpha_star_hat, fit_r2.
std::string exponent_csv(const std::vector<ExponentRow>& rows);

}  // namespace farfield
