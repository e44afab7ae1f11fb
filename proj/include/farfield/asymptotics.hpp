#pragma once

#include <optional>
#include <string>
#include <vector>

#include "farfield/fitting.hpp"
#include "farfield/fundamental_solutions.hpp"
#include "farfield/grid.hpp"

namespace farfield {

/// Grid rings nearest to r0 * 2^k inside the data, plus the outermost ring.
std::vector<int> dyadic_rings(const GridFunction& u, double r0 = 1.0);

/// u - P sampled on one grid sphere.
struct SphereDeviation {
  double radius = 0.0;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> dev;
  std::vector<double> grad_dev;
  std::vector<double> hess_dev;

  double mean() const;
  double min() const;
  double max() const;
  double sup_abs() const;
};

SphereDeviation sphere_deviation(const GridFunction& u, const Polynomial& p, int ring, int directions = 64);

enum class LimitKind { Finite, PlusInfinity, MinusInfinity, Inconclusive };

struct LimitEstimate {
  LimitKind kind = LimitKind::Inconclusive;
  /// Extrapolated limit; +-inf or NaN for the other kinds.
  double value = 0.0;
  std::vector<double> radii;
  std::vector<double> means;
  std::vector<double> oscillations;
  /// Sphere means beyond this magnitude with a monotone trend count as divergent.
  double divergence_threshold = 1e6;

  bool finite() const noexcept { return kind == LimitKind::Finite; }
  std::string to_json() const;
};

/// Limit of u - P at infinity from sphere means on dyadic spheres. Means that keep moving by
/// non-shrinking monotone increments (ratio >= 0.98) or exceed the divergence threshold with a
/// monotone trend give +-inf; contracting increments with non-growing oscillation give a
/// finite limit by geometric extrapolation; anything else is inconclusive.
LimitEstimate estimate_limit_at_infinity(const GridFunction& u, const Polynomial& p);
LimitEstimate estimate_limit_at_infinity(const GridFunction& u);

enum class DecayModel { PowerLaw, Logarithmic, Degenerate };
std::string to_string(DecayModel m);

struct DecaySample {
  double r = 0.0;
  double deviation = 0.0;
};

struct DecayFit {
  DecayModel model = DecayModel::Degenerate;
  /// Power of r (PowerLaw) or of ln r (Logarithmic); NaN when degenerate.
  double exponent = 0.0;
  double amplitude = 0.0;
  double r2 = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double rss_power = 0.0;
  double rss_log = 0.0;

  std::string to_json() const;
};

/// Fits log(dev) against log r and against log ln r on the samples with r > 1 and keeps the
/// log model when its residual is at most 80% of the power residual. Needs at least 5 samples
/// spanning a factor of 10 (InvalidInput otherwise). Deviations all below
/// 10 * eps * noise_scale give a Degenerate fit.
DecayFit fit_decay(const std::vector<DecaySample>& samples, double noise_scale = 1.0);

enum class TailVariant { Straddle, UpSim, DownSim, UpApprox, DownApprox };
std::string to_string(TailVariant v);

struct TailSphere {
  double radius = 0.0;
  double min_dev = 0.0;
  double max_dev = 0.0;
  double ratio_phi = 0.0;
  double ratio_phi_tilde = 0.0;
  double ratio_phi_spread = 0.0;
  double ratio_phi_tilde_spread = 0.0;
};

struct TailClass {
  std::optional<TailVariant> variant;
  /// Ratio limit for the four comparison alternatives.
  std::optional<double> a;
  LimitEstimate u_infinity;
  std::vector<TailSphere> spheres;

  bool conclusive() const noexcept { return variant.has_value(); }
  std::string to_json() const;
};

/// Classifies u - P against the fundamental pair (phi, -phi_tilde), where phi is the upward
/// solution of F and phi_tilde that of its dual. Ratios count as stabilized when every
/// pointwise ratio on the spheres of the last decade lies within 5% of a positive a.
TailClass classify_tail(const GridFunction& u, const Polynomial& p, const RadialTail& phi, const RadialTail& phi_tilde);

/// One row of the per-sphere statistics table.
struct SphereRow {
  double r = 0.0;
  double sup_dev = 0.0;
  double grad_dev = 0.0;
  double hess_dev = 0.0;
  double envelope = 0.0;
  double ratio_phi = 0.0;
  double ratio_phi_tilde = 0.0;
};

/// CSV with columns r, sup_dev, grad_dev, hess_dev, envelope, ratio_phi, ratio_phi_tilde.
std::string sphere_csv(const std::vector<SphereRow>& rows);

/// The theorem envelope for the Pucci class of e: ln r when Lambda/lambda = n - 1,
/// r^{1-(n-1)lambda/Lambda} otherwise.
double decay_envelope(const Ellipticity& e, double r);

struct DecayBoundOptions {
  bool include_hessian = false;
  /// Trend window; zeros mean [r_max / 10, r_max].
  double trend_lo = 0.0;
  double trend_hi = 0.0;
  /// Largest admissible log-log slope of a ratio over the trend window.
  double max_slope = 0.1;
  int directions = 64;
};

struct DecayBoundReport {
  std::vector<SphereRow> rows;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double slope0 = 0.0;
  double slope1 = 0.0;
  double slope2 = 0.0;
  bool no_growth = true;

  std::string to_json() const;
};

/// Per-sphere sup of |u - P|, |Du - DP| and (optionally) |D^2u - D^2P| divided by the
/// envelope, envelope / r and envelope / r^2. Running sups over r >= 2 (values) and r >= 4
/// (derivatives) give the empirical constants; radii with a zero envelope are skipped. The
/// ratio columns hold mean(u - P) / phi and mean(u - P) / (-phi_tilde) when the tails are given.
DecayBoundReport verify_decay_bounds(const GridFunction& u, const Polynomial& p, const Ellipticity& e,
                                     const DecayBoundOptions& options = {}, const RadialTail* phi = nullptr,
                                     const RadialTail* phi_tilde = nullptr);

/// max / min of u over each grid sphere nearest to the requested radii. Throws InvalidInput
/// when u <= 0 somewhere on a tested sphere.
std::vector<double> harnack_ratio(const GridFunction& u, const std::vector<double>& radii, int directions = 64);

}  // namespace farfield
