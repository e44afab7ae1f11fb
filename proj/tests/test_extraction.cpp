#include <cmath>

#include <gtest/gtest.h>

#include "farfield/errors.hpp"
#include "farfield/extraction.hpp"

using namespace farfield;

TEST(LinearExtraction, LaplaceDecayingTail) {
  const OperatorSpec f = OperatorSpec::laplace(3);
  const GridFunction u = GridFunction::sample(RadialGrid(1, 64, 1009), 3, [](double r) { return 2.0 + 1.0 / r; });
  const LinearExtraction ex = extract_linear_profile(u, f);
  EXPECT_LT(ex.profile.gradient.norm(), 1e-6);
  EXPECT_NEAR(ex.profile.constant, 2.0, 1e-3);
  EXPECT_TRUE(ex.trace.converged);
  // u lies below the v_i - b_i profile, so the min branch certifies.
  EXPECT_EQ(ex.trace.branch, "min");
  EXPECT_EQ(ex.trace.normalization, "limit");
  EXPECT_GE(ex.trace.steps.size(), 2u);
}

TEST(LinearExtraction, PolarLinearPlusGrowingTail) {
  const OperatorSpec f = OperatorSpec::pucci_plus(Ellipticity(1, 2, 2));
  const GridFunction u = GridFunction::sample(PolarGrid(1, 64, 127, 128), [](const Eigen::Vector2d& x) {
    return -0.5 * x(0) + 2.0 * x(1) + 1.0 - std::sqrt(x.norm());
  });
  const LinearExtraction ex = extract_linear_profile(u, f);
  EXPECT_NEAR(ex.profile.gradient(0), -0.5, 0.05);
  EXPECT_NEAR(ex.profile.gradient(1), 2.0, 0.05);
  EXPECT_NE(ex.trace.to_json().find("\"steps\""), std::string::npos);
}

TEST(LinearExtraction, RejectsBadInput) {
  const GridFunction u = GridFunction::sample(RadialGrid(1, 64, 1009), 3, [](double r) { return 1.0 / r; });
  EXPECT_THROW(extract_linear_profile(u, OperatorSpec::with_rhs(OperatorSpec::laplace(3), 1.0)), InvalidConfiguration);
  EXPECT_THROW(extract_linear_profile(u, OperatorSpec::laplace(2)), InvalidInput);
  ExtractionOptions o;
  o.schedule = {8.0, 4.0};
  EXPECT_THROW(extract_linear_profile(u, OperatorSpec::laplace(3), o), InvalidInput);
  o.schedule = {4.0, 128.0};
  EXPECT_THROW(extract_linear_profile(u, OperatorSpec::laplace(3), o), InvalidInput);
  const GridFunction big = GridFunction::sample(RadialGrid(1, 64, 1009), 3, [](double r) { return r * r; });
  EXPECT_THROW(extract_linear_profile(big, OperatorSpec::laplace(3)), InvalidInput);
}

TEST(LinearExtraction, NotConvergedCarriesTrace) {
  const OperatorSpec f = OperatorSpec::pucci_plus(Ellipticity(1, 2, 2));
  const GridFunction u = GridFunction::sample(PolarGrid(1, 64, 127, 128), [](const Eigen::Vector2d& x) {
    return x(0) - 2.0 * std::sqrt(x.norm());
  });
  ExtractionOptions o;
  o.schedule = {4.0, 8.0};
  o.tolerance = 1e-12;
  try {
    extract_linear_profile(u, f, o);
    FAIL() << "expected ExtractionError";
  } catch (const ExtractionError& e) {
    EXPECT_EQ(e.kind(), ExtractionError::Kind::NotConverged);
    EXPECT_EQ(e.trace().steps.size(), 2u);
    EXPECT_FALSE(e.trace().converged);
  }
}

TEST(QuadraticExtraction, LaplaceWithRhs) {
  const OperatorSpec f = OperatorSpec::laplace(3);
  const GridFunction u =
      GridFunction::sample(RadialGrid(1, 64, 1009), 3, [](double r) { return 0.5 * r * r + 1.0 / r; });
  const QuadraticExtraction ex = extract_quadratic_profile(u, f, 3.0);
  EXPECT_NEAR(ex.profile.operator_value, 3.0, 0.05);
  EXPECT_LT((ex.profile.hessian - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_TRUE(ex.trace.gradient_bounded);
  const Polynomial p = ex.profile.polynomial();
  EXPECT_EQ(p.dim(), 3);
}

TEST(QuadraticExtraction, ConstraintViolationIsReported) {
  const OperatorSpec f = OperatorSpec::laplace(3);
  const GridFunction u = GridFunction::sample(RadialGrid(1, 64, 1009), 3, [](double r) { return 0.5 * r * r + 1.0 / r; });
  ExtractionOptions o;
  o.constraint_tolerance = 1e-14;
  try {
    extract_quadratic_profile(u, f, 3.0, o);
    FAIL() << "expected ExtractionError";
  } catch (const ExtractionError& e) {
    EXPECT_EQ(e.kind(), ExtractionError::Kind::ConstraintViolated);
    EXPECT_TRUE(e.trace().converged);
  }
}
