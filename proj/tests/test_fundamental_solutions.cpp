#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "farfield/errors.hpp"
#include "farfield/fundamental_solutions.hpp"

using namespace farfield;

namespace {

// Hessian of the radial function f(|x|) at x by central differences of the 3D function.
Eigen::MatrixXd fd_hessian(const std::function<double(double)>& f, const Eigen::VectorXd& x0) {
  const int n = static_cast<int>(x0.size());
  const double h = 1e-4;
  Eigen::MatrixXd hess(n, n);
  const auto u = [&](const Eigen::VectorXd& x) { return f(x.norm()); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i) * h, ej = Eigen::VectorXd::Unit(n, j) * h;
      hess(i, j) = (u(x0 + ei + ej) - u(x0 + ei - ej) - u(x0 - ei + ej) + u(x0 - ei - ej)) / (4 * h * h);
    }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace

TEST(ScalingExponents, FrozenValues) {
  const ScalingExponents a = scaling_exponents(Ellipticity(1, 2, 2));
  EXPECT_EQ(a.alpha_plus, -0.5);
  EXPECT_EQ(a.alpha_minus, 1.0);
  const ScalingExponents b = scaling_exponents(Ellipticity(1, 1, 3));
  EXPECT_EQ(b.alpha_plus, 1.0);
  EXPECT_EQ(b.alpha_minus, 1.0);
  EXPECT_FALSE(b.alpha_star.has_value());
  EXPECT_EQ(decay_case(Ellipticity(1, 2, 2)), DecayCase::Growing);
  EXPECT_EQ(decay_case(Ellipticity(1, 2, 3)), DecayCase::Logarithmic);
  EXPECT_EQ(decay_case(Ellipticity(1, 1.5, 3)), DecayCase::Decaying);
}

TEST(RadialTail, UpwardBranches) {
  EXPECT_DOUBLE_EQ(RadialTail::upward(1.0).value(4.0), 0.25);
  EXPECT_DOUBLE_EQ(RadialTail::upward(0.0).value(std::exp(2.0)), -2.0);
  EXPECT_DOUBLE_EQ(RadialTail::upward(-0.5).value(4.0), -2.0);
  EXPECT_TRUE(RadialTail::upward(0.0).is_logarithmic());
  EXPECT_TRUE(RadialTail::upward(2.0).decays());
  EXPECT_FALSE(RadialTail::upward(-1.0).decays());
  EXPECT_DOUBLE_EQ(RadialTail::upward(0.7).scaling_exponent(), 0.7);
  EXPECT_DOUBLE_EQ(RadialTail::upward(-0.5).negated().value(4.0), 2.0);
}

TEST(RadialTail, DerivativesMatchFiniteDifferences) {
  for (double alpha : {-0.5, 0.0, 1.0, 2.3}) {
    const RadialTail t = RadialTail::upward(alpha);
    const double r = 2.7, h = 1e-5;
    EXPECT_NEAR(t.derivative(r), (t.value(r + h) - t.value(r - h)) / (2 * h), 1e-8) << alpha;
    EXPECT_NEAR(t.second_derivative(r), (t.derivative(r + h) - t.derivative(r - h)) / (2 * h), 1e-7) << alpha;
  }
}

TEST(FundamentalSolution, ClosedFormsSolveTheirOperator) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (const auto& e : {Ellipticity(1, 2, 2), Ellipticity(1, 2, 3), Ellipticity(1, 3, 4), Ellipticity(1, 1, 2)}) {
    for (auto side : {PucciSide::Plus, PucciSide::Minus}) {
      for (auto orient : {Orientation::Upward, Orientation::Downward}) {
        const FundamentalSolution fs(side, orient, e);
        Eigen::VectorXd x(e.dim());
        for (int i = 0; i < e.dim(); ++i) x(i) = g(rng);
        x *= 3.0 / x.norm();
        const Eigen::MatrixXd hess = fd_hessian([&](double r) { return fs.eval(r); }, x);
        const double value = side == PucciSide::Plus ? pucci_plus(SymMatrix(hess), e) : pucci_minus(SymMatrix(hess), e);
        EXPECT_NEAR(value, 0.0, 1e-5);
      }
    }
  }
}

TEST(FundamentalSolution, OrientationPairs) {
  const Ellipticity e(1, 2, 2);
  const FundamentalSolution up_plus(PucciSide::Plus, Orientation::Upward, e);
  const FundamentalSolution down_plus(PucciSide::Plus, Orientation::Downward, e);
  const FundamentalSolution up_minus(PucciSide::Minus, Orientation::Upward, e);
  // E+ = -r^{1/2}, E- = r^{-1} at (1, 2, 2); e+ = -E-.
  EXPECT_DOUBLE_EQ(up_plus.eval(4.0), -2.0);
  EXPECT_DOUBLE_EQ(up_minus.eval(4.0), 0.25);
  EXPECT_DOUBLE_EQ(down_plus.eval(4.0), -0.25);
  EXPECT_THROW(up_plus.eval(0.0), InvalidInput);
  EXPECT_EQ(down_plus.solved_operator().kind(), OperatorKind::PucciPlus);
}

TEST(FundamentalSolution, ResidualIsRoundoffSmall) {
  const Ellipticity e(1, 2, 3);
  const FundamentalSolution fs(PucciSide::Plus, Orientation::Upward, e);
  for (double r : {1.1, 5.0, 50.0}) EXPECT_LE(std::abs(radial_residual(fs.solved_operator(), fs.tail(), r)), 1e-12);
  const std::vector<SymMatrix> fixed{SymMatrix(Eigen::Matrix3d::Identity() + 0.1 * Eigen::Matrix3d::Ones())};
  EXPECT_THROW(radial_residual(OperatorSpec::bellman_unchecked(e, fixed), fs.tail(), 2.0), InvalidConfiguration);
}

TEST(Exponent, RotationInvariantExactValues) {
  EXPECT_NEAR(rotation_invariant_exponent(OperatorSpec::laplace(3)), 1.0, 1e-12);
  EXPECT_NEAR(rotation_invariant_exponent(OperatorSpec::laplace(2)), 0.0, 1e-12);
  EXPECT_NEAR(rotation_invariant_exponent(OperatorSpec::laplace(5)), 3.0, 1e-12);
  const Ellipticity e(1, 2, 2);
  EXPECT_NEAR(rotation_invariant_exponent(OperatorSpec::pucci_plus(e)), -0.5, 1e-12);
  EXPECT_NEAR(rotation_invariant_exponent(OperatorSpec::pucci_minus(e)), 1.0, 1e-12);
  EXPECT_THROW(rotation_invariant_exponent(OperatorSpec::with_rhs(OperatorSpec::laplace(2), 1.0)), InvalidConfiguration);
}

TEST(Exponent, BellmanExponentsLieInPucciBracket) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const Ellipticity e(1.0, 1.0 + 3.0 * std::uniform_real_distribution<double>()(rng), 2 + t % 3);
    std::uniform_real_distribution<double> spec(e.lower(), e.upper());
    std::vector<double> d(e.dim());
    for (auto& x : d) x = spec(rng);
    const OperatorSpec f = OperatorSpec::bellman(e, {SymMatrix::diagonal(d)}, ControlSet::RotationClosed);
    const ScalingExponents s = scaling_exponents(e);
    const double a = rotation_invariant_exponent(f);
    EXPECT_GE(a, s.alpha_plus - 1e-9);
    EXPECT_LE(a, s.alpha_minus + 1e-9);
    // The upward tail solves F away from the origin.
    EXPECT_NEAR(radial_residual(f, upward_tail(f), 3.0), 0.0, 1e-9);
  }
}

TEST(Exponent, EstimateRecoversLaplace) {
  const ExponentEstimate est = estimate_scaling_exponent(OperatorSpec::laplace(3));
  EXPECT_NEAR(est.alpha_hat, 1.0, 0.02);
  EXPECT_FALSE(est.logarithmic);
  EXPECT_EQ(est.per_radius.size(), 4u);
  const ExponentEstimate log2d = estimate_scaling_exponent(OperatorSpec::laplace(2));
  EXPECT_TRUE(log2d.logarithmic);
  EXPECT_NEAR(log2d.alpha_hat, 0.0, 0.02);
}

TEST(Normalization, ScaleAndShift) {
  const std::vector<double> s{2.0, 4.0, 3.0};
  const Normalization a = normalize_upward(s, 1.0);
  EXPECT_EQ(a.kind, Normalization::Kind::Scale);
  EXPECT_DOUBLE_EQ(a.value, 0.5);
  const std::vector<double> neg{-2.0, -4.0};
  EXPECT_DOUBLE_EQ(normalize_upward(neg, -0.5).value, 0.5);
  const Normalization b = normalize_upward(s, 0.0);
  EXPECT_EQ(b.kind, Normalization::Kind::Shift);
  EXPECT_DOUBLE_EQ(b.value, -3.0);
  EXPECT_THROW(normalize_upward(std::vector<double>{}, 1.0), InvalidInput);
}

TEST(ExponentCsv, Header) {
  const std::string csv = exponent_csv({{1, 2, 2, -0.5, 1.0, -0.49, 0.9999}});
  EXPECT_NE(csv.find("lambda,Lambda,n,alpha_plus,alpha_minus,alpha_star_hat,fit_r2"), std::string::npos);
}
