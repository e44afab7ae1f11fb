#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "farfield/errors.hpp"
#include "farfield/fd_solver.hpp"
#include "farfield/fundamental_solutions.hpp"
#include "farfield/radial_scheme.hpp"

using namespace farfield;

namespace {

// 1D chain on nodes 0..n-1 with u_0 = 0, u_{n-1} = 1 and
// max(D2 u, 3 D2 u - c) = 0 at interior nodes, D2 the 3-point second difference.
class ChainProblem : public PolicyProblem {
 public:
  ChainProblem(int n, double c) : n_(n), c_(c) {}
  int size() const override { return n_; }
  Sense sense() const override { return Sense::Max; }
  bool is_dirichlet(int i) const override { return i == 0 || i == n_ - 1; }
  double dirichlet_value(int i) const override { return i == 0 ? 0.0 : 1.0; }
  int policy_count(int) const override { return 2; }
  void policy_values(int i, const std::vector<double>& u, std::vector<double>& out) const override {
    const double d2 = u[i - 1] - 2 * u[i] + u[i + 1];
    out = {d2, 3 * d2 - c_};
  }
  void policy_row(int i, int policy, LinearRow& row) const override {
    const double s = policy == 0 ? 1.0 : 3.0;
    row.entries = {{i - 1, s}, {i, -2 * s}, {i + 1, s}};
    row.constant = policy == 0 ? 0.0 : -c_;
  }
  bool tridiagonal() const override { return true; }

 private:
  int n_;
  double c_;
};

}  // namespace

TEST(Howard, SolvesChainProblem) {
  // With c > 0 the solution is the straight line: d2 = 0 and policy 1 gives -c < 0.
  const ChainProblem p(11, 0.5);
  const HowardResult r = howard_solve(p);
  for (int i = 0; i < 11; ++i) EXPECT_NEAR(r.u[i], i / 10.0, 1e-12);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_LE(bellman_residual(p, r.u), 1e-10);
  EXPECT_GT(bellman_residual(p, std::vector<double>(11, 0.3)), 1e-3);
}

TEST(Howard, NegativeOffsetBendsTheChain) {
  // With c < 0 the line has 3 d2 - c > 0; the solution has d2 = c / 3 at every node.
  const ChainProblem p(11, -0.3);
  const HowardResult r = howard_solve(p);
  EXPECT_LE(r.residual, 1e-10);
  for (int i = 1; i < 10; ++i) EXPECT_NEAR(r.u[i - 1] - 2 * r.u[i] + r.u[i + 1], -0.1, 1e-10);
}

TEST(RadialSolver, LaplaceMatchesClosedForm) {
  const RadialGrid g(1.0, 4.0, 301);
  const BoundaryFn exact = [](const Eigen::VectorXd& x) { return 1.0 / x.norm(); };
  const Solution s = solve_radial({OperatorSpec::laplace(3), g, 0.0, exact, {}});
  double err = 0.0;
  for (int i = 0; i < g.nodes(); ++i) err = std::max(err, std::abs(s.u.values()[i] - 1.0 / g.radius(i)));
  EXPECT_LT(err, 1e-4);
  EXPECT_LE(s.report.residual, 1e-10);
}

TEST(RadialSolver, PucciFundamentalSolutionSecondOrder) {
  const OperatorSpec f = OperatorSpec::pucci_plus(Ellipticity(1, 2, 2));
  const BoundaryFn exact = [](const Eigen::VectorXd& x) { return -std::sqrt(x.norm()); };
  const auto rows = convergence_study({f, RadialGrid(1, 16, 33), 0.0, exact, {}}, exact, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(std::isnan(rows[0].order));
  EXPECT_GT(rows[2].order, 1.8);
  EXPECT_LT(rows[2].sup_error, rows[1].sup_error);
}

TEST(RadialSolver, BallWithRightHandSide) {
  // Laplace in R^3 with rhs 3: u = r^2 / 2 + const; data u(2) = 2.
  const RadialGrid g(0.0, 2.0, 81);
  const Solution s = solve_radial({OperatorSpec::laplace(3), g, 3.0, [](const Eigen::VectorXd&) { return 2.0; }, {}});
  for (int i = 0; i < g.nodes(); ++i) EXPECT_NEAR(s.u.values()[i], 0.5 * g.radius(i) * g.radius(i), 1e-9);
}

TEST(RadialSolver, RejectsMeshViolationAndNonRadialOperator) {
  const Ellipticity e(1, 10, 3);
  EXPECT_NEAR(radial_mesh_limit(e, 1.0), 0.1, 1e-15);
  const BoundaryFn zero = [](const Eigen::VectorXd&) { return 0.0; };
  EXPECT_THROW(solve_radial({OperatorSpec::pucci_plus(e), RadialGrid(1, 2, 5), 0.0, zero, {}}), InvalidConfiguration);
  const std::vector<SymMatrix> c{SymMatrix(Eigen::Matrix2d::Identity() + 0.2 * Eigen::Matrix2d::Ones())};
  const OperatorSpec fixed = OperatorSpec::bellman_unchecked(Ellipticity(1, 2, 2), c);
  EXPECT_THROW(solve_radial({fixed, RadialGrid(1, 2, 41), 0.0, zero, {}}), InvalidConfiguration);
}

TEST(PolarSolver, AffineDataIsReproduced) {
  const auto p = [](const Eigen::VectorXd& x) { return 1.0 + 0.3 * x(0) - 2.0 * x(1); };
  for (const auto& f : {OperatorSpec::laplace(2), OperatorSpec::pucci_plus(Ellipticity(1, 3, 2)),
                        OperatorSpec::pucci_minus(Ellipticity(1, 2, 2))}) {
    for (double r_in : {0.0, 1.0}) {
      const Solution s = solve_polar({f, PolarGrid(r_in, 8.0, 17, 32), 0.0, p, {}});
      const PolarGrid& g = s.u.polar_grid();
      for (int k = 0; k < g.node_count(); ++k) EXPECT_NEAR(s.u.values()[k], p(Eigen::VectorXd(g.point(k))), 1e-8);
    }
  }
}

TEST(PolarSolver, RadialQuadraticWithRhs) {
  // Laplace u = 1 with u = |x|^2 / 4 on the boundary of B_2.
  const auto exact = [](const Eigen::VectorXd& x) { return 0.25 * x.squaredNorm(); };
  const Solution s = solve_polar({OperatorSpec::laplace(2), PolarGrid(0, 2, 17, 32), 1.0, exact, {}});
  const PolarGrid& g = s.u.polar_grid();
  double err = 0.0;
  for (int k = 0; k < g.node_count(); ++k) err = std::max(err, std::abs(s.u.values()[k] - exact(Eigen::VectorXd(g.point(k)))));
  EXPECT_LT(err, 1e-2);
}

TEST(PolarSolver, RejectsWrongDimensionAndFrames) {
  const BoundaryFn zero = [](const Eigen::VectorXd&) { return 0.0; };
  EXPECT_THROW(solve_polar({OperatorSpec::laplace(3), PolarGrid(1, 2, 5, 16), 0.0, zero, {}}), InvalidConfiguration);
  SolveOptions o;
  o.frames = 2;
  EXPECT_THROW(solve_polar({OperatorSpec::laplace(2), PolarGrid(1, 2, 5, 16), 0.0, zero, {}}, o), InvalidConfiguration);
}

TEST(PolarSolver, ConvergesOnFundamentalSolution) {
  const OperatorSpec f = OperatorSpec::pucci_plus(Ellipticity(1, 2, 2));
  const BoundaryFn exact = [](const Eigen::VectorXd& x) { return -std::sqrt(x.norm()); };
  const auto rows = convergence_study({f, PolarGrid(1, 16, 17, 32), 0.0, exact, {}}, exact, 3);
  EXPECT_LT(rows[1].sup_error, rows[0].sup_error);
  EXPECT_LT(rows[2].sup_error, rows[1].sup_error);
  EXPECT_GT(rows[2].order, 0.8);
}

TEST(Comparison, RandomOrderedPairs) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1, 1), pos(0, 1);
  for (int t = 0; t < 12; ++t) {
    const Ellipticity e(1.0, 1.0 + 2.0 * pos(rng), 2);
    const OperatorSpec f = t % 2 ? OperatorSpec::pucci_plus(e) : OperatorSpec::pucci_minus(e);
    const double a = u(rng), b = u(rng), c = pos(rng);
    const BoundaryFn lo = [=](const Eigen::VectorXd& x) { return a * x(0) + b * std::sin(3 * std::atan2(x(1), x(0))); };
    const BoundaryFn hi = [=](const Eigen::VectorXd& x) { return lo(x) + c * (1 + std::cos(std::atan2(x(1), x(0)))); };
    if (t % 3 == 0) {
      const ComparisonReport r = discrete_comparison_check({f, RadialGrid(1, 3, 41), 0.0, {}, {}}, lo, hi);
      EXPECT_TRUE(r.pass) << t;
    } else {
      const ComparisonReport r = discrete_comparison_check({f, PolarGrid(t % 3 == 1 ? 0 : 1, 3, 9, 16), 0.0, {}, {}}, lo, hi);
      EXPECT_TRUE(r.pass) << t << " worst " << r.worst;
    }
  }
  const BoundaryFn one = [](const Eigen::VectorXd&) { return 1.0; };
  const BoundaryFn zero = [](const Eigen::VectorXd&) { return 0.0; };
  EXPECT_THROW(discrete_comparison_check({OperatorSpec::laplace(2), PolarGrid(1, 3, 9, 16), 0.0, {}, {}}, one, zero),
               InvalidInput);
}

TEST(BallSequence, LinearExteriorGivesLinearBalls) {
  const PolarGrid g(1, 16, 31, 64);
  const GridFunction u = GridFunction::sample(g, [](const Eigen::Vector2d& x) { return 2.0 * x(0) - x(1) + 0.5; });
  const auto balls = solve_ball_sequence(u, OperatorSpec::pucci_plus(Ellipticity(1, 2, 2)), 0.0, {4.0, 8.0});
  ASSERT_EQ(balls.size(), 2u);
  for (const auto& b : balls) {
    const auto& v = b.solution.u;
    const PolarGrid& bg = v.polar_grid();
    EXPECT_DOUBLE_EQ(bg.r_out(), b.radius);
    for (int k = 0; k < bg.node_count(); ++k) {
      const Eigen::Vector2d x = bg.point(k);
      EXPECT_NEAR(v.values()[k], 2.0 * x(0) - x(1) + 0.5, 1e-7);
    }
  }
}

TEST(SolveReport, JsonFields) {
  SolveReport r;
  r.iterations = 3;
  const std::string j = r.to_json();
  for (const char* key : {"iterations", "residual", "policy_switches", "wall_ms"}) EXPECT_NE(j.find(key), std::string::npos);
}
