#include <cmath>

#include <gtest/gtest.h>

#include "farfield/asymptotics.hpp"
#include "farfield/errors.hpp"

using namespace farfield;

namespace {

GridFunction radial(int n, const std::function<double(double)>& f, int nodes = 1009) {
  return GridFunction::sample(RadialGrid(1.0, 64.0, nodes), n, f);
}

std::vector<DecaySample> samples(const std::function<double(double)>& dev) {
  std::vector<DecaySample> s;
  for (double r = 2.0; r <= 64.0; r *= 2.0) s.push_back({r, dev(r)});
  return s;
}

}  // namespace

TEST(DyadicRings, PowersOfTwoAndOuter) {
  const GridFunction u = radial(3, [](double r) { return r; });
  const auto rings = dyadic_rings(u);
  ASSERT_EQ(rings.size(), 7u);
  for (std::size_t k = 0; k < rings.size(); ++k) EXPECT_NEAR(u.ring_radius(rings[k]), std::pow(2.0, k), 1e-12);
}

TEST(SphereDeviation, RadialStatistics) {
  const GridFunction u = radial(2, [](double r) { return 3.0 + 1.0 / r; });
  const Polynomial p = Polynomial::affine(Eigen::Vector2d::Zero(), 3.0);
  const SphereDeviation d = sphere_deviation(u, p, u.nearest_ring(4.0), 16);
  EXPECT_NEAR(d.mean(), 0.25, 1e-12);
  EXPECT_NEAR(d.sup_abs(), 0.25, 1e-12);
  EXPECT_NEAR(d.max() - d.min(), 0.0, 1e-12);
  for (double g : d.grad_dev) EXPECT_NEAR(g, 1.0 / 16.0, 1e-3);
}

TEST(Limit, FiniteForDecayingTail) {
  const LimitEstimate l = estimate_limit_at_infinity(radial(3, [](double r) { return 1.0 + 1.0 / r; }));
  ASSERT_EQ(l.kind, LimitKind::Finite);
  EXPECT_NEAR(l.value, 1.0, 1e-3);
  EXPECT_EQ(l.radii.size(), l.means.size());
}

TEST(Limit, InfiniteForLogAndPowerGrowth) {
  EXPECT_EQ(estimate_limit_at_infinity(radial(2, [](double r) { return -std::log(r); })).kind, LimitKind::MinusInfinity);
  EXPECT_EQ(estimate_limit_at_infinity(radial(2, [](double r) { return std::sqrt(r); })).kind, LimitKind::PlusInfinity);
}

TEST(Limit, SubtractsPolynomial) {
  const GridFunction u = GridFunction::sample(PolarGrid(1, 64, 127, 64), [](const Eigen::Vector2d& x) {
    return 2.0 * x(0) + 0.5 + 1.0 / x.squaredNorm();
  });
  const LimitEstimate l = estimate_limit_at_infinity(u, Polynomial::affine(Eigen::Vector2d(2.0, 0.0), 0.0));
  ASSERT_TRUE(l.finite());
  EXPECT_NEAR(l.value, 0.5, 1e-3);
}

TEST(DecayFit, PowerLaw) {
  const DecayFit f = fit_decay(samples([](double r) { return 2.0 * std::sqrt(r); }));
  EXPECT_EQ(f.model, DecayModel::PowerLaw);
  EXPECT_NEAR(f.exponent, 0.5, 1e-10);
  EXPECT_NEAR(f.amplitude, 2.0, 1e-9);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.window_lo, 2.0);
  EXPECT_DOUBLE_EQ(f.window_hi, 64.0);
}

TEST(DecayFit, DecayingPowerLaw) {
  const DecayFit f = fit_decay(samples([](double r) { return 0.7 / r; }));
  EXPECT_EQ(f.model, DecayModel::PowerLaw);
  EXPECT_NEAR(f.exponent, -1.0, 1e-10);
}

TEST(DecayFit, Logarithmic) {
  const DecayFit f = fit_decay(samples([](double r) { return 1.5 * std::log(r); }));
  EXPECT_EQ(f.model, DecayModel::Logarithmic);
  EXPECT_NEAR(f.exponent, 1.0, 1e-10);
  EXPECT_NEAR(f.amplitude, 1.5, 1e-9);
  EXPECT_LE(f.rss_log, 0.8 * f.rss_power);
}

TEST(DecayFit, DegenerateAndTooFewSamples) {
  const DecayFit f = fit_decay(samples([](double) { return 1e-17; }));
  EXPECT_EQ(f.model, DecayModel::Degenerate);
  EXPECT_TRUE(std::isnan(f.exponent));
  const std::vector<DecaySample> few{{2, 1}, {4, 2}, {8, 3}, {16, 4}};
  EXPECT_THROW(fit_decay(few), InvalidInput);
  const std::vector<DecaySample> narrow{{2, 1}, {3, 2}, {4, 3}, {5, 4}, {6, 5}};
  EXPECT_THROW(fit_decay(narrow), InvalidInput);
}

TEST(Classify, UpSimForLaplaceDecay) {
  const OperatorSpec f = OperatorSpec::laplace(3);
  const GridFunction u = radial(3, [](double r) { return 1.0 + 2.0 / r; });
  const TailClass tc = classify_tail(u, Polynomial::affine(Eigen::Vector3d::Zero(), 1.0), upward_tail(f), upward_tail(f.dual()));
  ASSERT_TRUE(tc.conclusive());
  EXPECT_EQ(*tc.variant, TailVariant::UpSim);
  EXPECT_NEAR(*tc.a, 2.0, 0.04);
}

TEST(Classify, DownSimForNegativeMultiple) {
  const OperatorSpec f = OperatorSpec::laplace(3);
  const GridFunction u = radial(3, [](double r) { return -0.5 / r; });
  const TailClass tc = classify_tail(u, Polynomial::zero(3), upward_tail(f), upward_tail(f.dual()));
  ASSERT_TRUE(tc.conclusive());
  EXPECT_EQ(*tc.variant, TailVariant::DownSim);
  EXPECT_NEAR(*tc.a, 0.5, 0.01);
}

TEST(Classify, ApproxForLogarithm) {
  const OperatorSpec f = OperatorSpec::laplace(2);
  const TailClass up = classify_tail(radial(2, [](double r) { return -3.0 * std::log(r); }), Polynomial::zero(2),
                                     upward_tail(f), upward_tail(f.dual()));
  ASSERT_TRUE(up.conclusive());
  EXPECT_EQ(*up.variant, TailVariant::UpApprox);
  EXPECT_NEAR(*up.a, 3.0, 0.06);
  const TailClass down = classify_tail(radial(2, [](double r) { return std::log(r); }), Polynomial::zero(2),
                                       upward_tail(f), upward_tail(f.dual()));
  ASSERT_TRUE(down.conclusive());
  EXPECT_EQ(*down.variant, TailVariant::DownApprox);
}

TEST(Classify, StraddleForExactPolynomial) {
  const OperatorSpec f = OperatorSpec::laplace(2);
  const Polynomial p = Polynomial::affine(Eigen::Vector2d(1.0, 1.0), -2.0);
  const GridFunction u = GridFunction::sample(PolarGrid(1, 64, 127, 64), [&](const Eigen::Vector2d& x) { return p(x); });
  const TailClass tc = classify_tail(u, p, upward_tail(f), upward_tail(f.dual()));
  ASSERT_TRUE(tc.conclusive());
  EXPECT_EQ(*tc.variant, TailVariant::Straddle);
  EXPECT_NE(tc.to_json().find("straddle"), std::string::npos);
}

TEST(Envelope, ThreeRegimes) {
  EXPECT_DOUBLE_EQ(decay_envelope(Ellipticity(1, 2, 2), 16.0), 4.0);
  EXPECT_DOUBLE_EQ(decay_envelope(Ellipticity(1, 1, 2), 16.0), std::log(16.0));
  EXPECT_DOUBLE_EQ(decay_envelope(Ellipticity(1, 1, 3), 4.0), 0.25);
}

TEST(DecayBounds, ExactMultipleOfEnvelope) {
  const Ellipticity e(1, 2, 2);
  const Polynomial p = Polynomial::affine(Eigen::Vector2d(1.0, 0.0), 0.0);
  const GridFunction u =
      GridFunction::sample(PolarGrid(1, 64, 127, 128), [&](const Eigen::Vector2d& x) { return p(x) - 3.0 * std::sqrt(x.norm()); });
  const DecayBoundReport b = verify_decay_bounds(u, p, e);
  EXPECT_NEAR(b.c0, 3.0, 1e-9);
  EXPECT_NEAR(b.slope0, 0.0, 1e-9);
  EXPECT_LT(std::abs(b.slope1), 0.1);
  EXPECT_TRUE(b.no_growth);
  EXPECT_EQ(sphere_csv(b.rows).rfind("# farfield-csv v1 spheres", 0), 0u);
}

TEST(DecayBounds, DetectsFasterGrowth) {
  const Ellipticity e(1, 2, 2);
  const GridFunction u = GridFunction::sample(PolarGrid(1, 64, 127, 128), [](const Eigen::Vector2d& x) { return x.norm(); });
  const DecayBoundReport b = verify_decay_bounds(u, Polynomial::zero(2), e);
  EXPECT_NEAR(b.slope0, 0.5, 0.02);
  EXPECT_FALSE(b.no_growth);
}

TEST(Harnack, RatioOfPositiveFunction) {
  const GridFunction u =
      GridFunction::sample(PolarGrid(1, 16, 31, 64), [](const Eigen::Vector2d& x) { return 2.0 + x(0) / x.norm(); });
  const auto ratios = harnack_ratio(u, {2.0, 8.0});
  ASSERT_EQ(ratios.size(), 2u);
  for (double q : ratios) EXPECT_NEAR(q, 3.0, 1e-12);
  const GridFunction neg = GridFunction::sample(PolarGrid(1, 16, 31, 64), [](const Eigen::Vector2d& x) { return x(0); });
  EXPECT_THROW(harnack_ratio(neg, {2.0}), InvalidInput);
}
