#include "farfield/howard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "farfield/errors.hpp"

namespace farfield {

double LinearRow::apply(const std::vector<double>& u) const {
  double v = constant;
  for (const auto& [k, w] : entries) v += w * u[k];
  return v;
}

namespace {

bool better(Sense s, double candidate, double current, double tie) {
  return s == Sense::Max ? candidate > current + tie : candidate < current - tie;
}

double max_abs(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double diagonal_scale(const PolicyProblem& pb) {
  double scale = 1.0;
  LinearRow row;
  for (int i = 0; i < pb.size(); ++i) {
    if (pb.is_dirichlet(i)) continue;
    for (int p = 0; p < pb.policy_count(i); ++p) {
      pb.policy_row(i, p, row);
      for (const auto& [k, w] : row.entries) {
        if (k == i) scale = std::max(scale, std::abs(w));
      }
    }
  }
  return scale;
}

std::vector<double> solve_tridiagonal(const PolicyProblem& pb, const std::vector<int>& policy) {
  const int n = pb.size();
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  LinearRow row;
  for (int i = 0; i < n; ++i) {
    if (pb.is_dirichlet(i)) {
      diag[i] = 1.0;
      rhs[i] = pb.dirichlet_value(i);
      continue;
    }
    pb.policy_row(i, policy[i], row);
    rhs[i] = -row.constant;
    for (const auto& [k, w] : row.entries) {
      if (k == i) diag[i] += w;
      else if (k == i - 1) lower[i] += w;
      else if (k == i + 1) upper[i] += w;
      else throw InvalidConfiguration("howard: row is not tridiagonal");
    }
  }
  for (int i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> u(n);
  u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
  return u;
}

std::vector<double> solve_sparse(const PolicyProblem& pb, const std::vector<int>& policy) {
  const int n = pb.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 16);
  Eigen::VectorXd rhs(n);
  LinearRow row;
  for (int i = 0; i < n; ++i) {
    if (pb.is_dirichlet(i)) {
      triplets.emplace_back(i, i, 1.0);
      rhs(i) = pb.dirichlet_value(i);
      continue;
    }
    pb.policy_row(i, policy[i], row);
    rhs(i) = -row.constant;
    for (const auto& [k, w] : row.entries) triplets.emplace_back(i, k, w);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NonConvergence("howard: sparse factorization failed", -1.0);
  const Eigen::VectorXd x = lu.solve(rhs);
  return std::vector<double>(x.data(), x.data() + n);
}

struct Improvement {
  double residual = 0.0;
  int switches = 0;
};

Improvement improve(const PolicyProblem& pb, const std::vector<double>& u, std::vector<int>& policy, double scale,
                    bool update) {
  Improvement out;
  const double tie = 1e-13 * scale * std::max(1.0, max_abs(u));
  std::vector<double> values;
  for (int i = 0; i < pb.size(); ++i) {
    if (pb.is_dirichlet(i)) {
      out.residual = std::max(out.residual, scale * std::abs(u[i] - pb.dirichlet_value(i)));
      continue;
    }
    pb.policy_values(i, u, values);
    int best = policy[i];
    for (int q = 0; q < static_cast<int>(values.size()); ++q) {
      if (better(pb.sense(), values[q], values[best], tie)) best = q;
    }
    out.residual = std::max(out.residual, std::abs(values[best]));
    if (best != policy[i]) {
      ++out.switches;
      if (update) policy[i] = best;
    }
  }
  out.residual /= scale * std::max(1.0, max_abs(u));
  return out;
}

}  // namespace

double bellman_residual(const PolicyProblem& problem, const std::vector<double>& u) {
  std::vector<int> policy(problem.size(), 0);
  return improve(problem, u, policy, diagonal_scale(problem), false).residual;
}

HowardResult howard_solve(const PolicyProblem& pb, const HowardOptions& options) {
  const int n = pb.size();
  const double scale = diagonal_scale(pb);
  std::vector<int> policy(n, 0);
  std::vector<double> u(n, 0.0);
  std::set<std::size_t> seen;
  HowardResult result;

  auto policy_hash = [&]() {
    std::size_t h = 1469598103934665603ULL;
    for (int p : policy) h = (h ^ static_cast<std::size_t>(p + 1)) * 1099511628211ULL;
    return h;
  };

  double residual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    std::vector<double> next = pb.tridiagonal() ? solve_tridiagonal(pb, policy) : solve_sparse(pb, policy);
    if (result.damped) {
      for (int i = 0; i < n; ++i) u[i] += options.damping * (next[i] - u[i]);
    } else {
      u = std::move(next);
    }
    const Improvement imp = improve(pb, u, policy, scale, true);
    result.iterations = it;
    result.policy_switches += imp.switches;
    residual = imp.residual;
    if (residual <= options.tolerance || (imp.switches == 0 && !result.damped)) {
      result.u = std::move(u);
      result.residual = residual;
      return result;
    }
    if (!seen.insert(policy_hash()).second) result.damped = true;
  }
  throw NonConvergence("howard: no convergence after " + std::to_string(options.max_iterations) + " iterations",
                       residual);
}

}  // namespace farfield
