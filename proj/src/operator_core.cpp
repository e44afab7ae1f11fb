#include "farfield/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "farfield/errors.hpp"

namespace farfield {

Ellipticity::Ellipticity(double lower, double upper, int dim) : lower_(lower), upper_(upper), dim_(dim) {
  if (!(lower > 0.0) || !(lower <= upper) || !std::isfinite(upper)) {
    throw InvalidInput("ellipticity constants must satisfy 0 < lambda <= Lambda < inf");
  }
  if (dim < 2) {
    throw InvalidInput("dimension must be at least 2");
  }
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("symmetric matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidInput("matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n), Trusted{}); }

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n), Trusted{}); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  if (d.empty()) throw InvalidInput("diagonal must be nonempty");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                            static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return SymMatrix(std::move(m), Trusted{});
}

Eigen::VectorXd SymMatrix::eigenvalues() const {
  if (m_.rows() == 1) return m_.diagonal();
  if (m_.rows() == 2) {
    // Closed form keeps the 2D solvers cheap and exact on diagonal input.
    const double a = m_(0, 0), b = m_(0, 1), c = m_(1, 1);
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    Eigen::VectorXd ev(2);
    ev << mean - rad, mean + rad;
    if (b == 0.0) {
      ev << std::min(a, c), std::max(a, c);
    }
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

bool SymMatrix::spectrum_within(double lo, double hi, double tol) const {
  const Eigen::VectorXd ev = eigenvalues();
  return ev.minCoeff() >= lo - tol && ev.maxCoeff() <= hi + tol;
}

bool SymMatrix::is_scalar(double tol) const {
  const double c = m_.trace() / static_cast<double>(m_.rows());
  const Eigen::MatrixXd diff = m_ - c * Eigen::MatrixXd::Identity(m_.rows(), m_.cols());
  return diff.cwiseAbs().maxCoeff() <= tol * std::max(1.0, std::abs(c));
}

SymMatrix SymMatrix::operator-() const { return SymMatrix(-m_, Trusted{}); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw InvalidInput("matrix order mismatch");
  return SymMatrix(a.m_ + b.m_, SymMatrix::Trusted{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw InvalidInput("matrix order mismatch");
  return SymMatrix(a.m_ - b.m_, SymMatrix::Trusted{});
}

SymMatrix operator*(double t, const SymMatrix& a) { return SymMatrix(t * a.m_, SymMatrix::Trusted{}); }

// ---------------------------------------------------------------------------
// Pucci extremal operators

double pucci_plus(std::span<const double> eigenvalues, double lower, double upper) {
  double pos = 0.0, neg = 0.0;
  for (double ev : eigenvalues) {
    if (ev > kEigenvalueZeroTol) {
      pos += ev;
    } else if (ev < -kEigenvalueZeroTol) {
      neg += ev;
    }
  }
  return upper * pos + lower * neg;
}

double pucci_minus(std::span<const double> eigenvalues, double lower, double upper) {
  double pos = 0.0, neg = 0.0;
  for (double ev : eigenvalues) {
    if (ev > kEigenvalueZeroTol) {
      pos += ev;
    } else if (ev < -kEigenvalueZeroTol) {
      neg += ev;
    }
  }
  return lower * pos + upper * neg;
}

namespace {

void require_order(const SymMatrix& m, int n) {
  if (m.order() != n) {
    throw InvalidInput("matrix order " + std::to_string(m.order()) + " does not match dimension " +
                       std::to_string(n));
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double pucci_plus(const SymMatrix& m, const Ellipticity& e) {
  require_order(m, e.dim());
  const Eigen::VectorXd ev = m.eigenvalues();
  return pucci_plus(as_span(ev), e.lower(), e.upper());
}

double pucci_minus(const SymMatrix& m, const Ellipticity& e) {
  require_order(m, e.dim());
  const Eigen::VectorXd ev = m.eigenvalues();
  return pucci_minus(as_span(ev), e.lower(), e.upper());
}

// ---------------------------------------------------------------------------
// OperatorSpec

OperatorSpec OperatorSpec::pucci_plus(const Ellipticity& e) { return OperatorSpec(OperatorKind::PucciPlus, e); }

OperatorSpec OperatorSpec::pucci_minus(const Ellipticity& e) { return OperatorSpec(OperatorKind::PucciMinus, e); }

OperatorSpec OperatorSpec::laplace(int n) { return OperatorSpec(OperatorKind::Laplace, Ellipticity(1.0, 1.0, n)); }

OperatorSpec OperatorSpec::bellman(const Ellipticity& e, std::vector<SymMatrix> controls, ControlSet set) {
  for (const auto& a : controls) {
    if (a.order() == e.dim() && !a.spectrum_within(e.lower(), e.upper())) {
      throw InvalidConfiguration("Bellman control has spectrum outside [lambda, Lambda]");
    }
  }
  return bellman_unchecked(e, std::move(controls), set);
}

OperatorSpec OperatorSpec::bellman_unchecked(const Ellipticity& e, std::vector<SymMatrix> controls,
                                             ControlSet set) {
  if (controls.empty()) throw InvalidConfiguration("Bellman operator needs at least one control");
  for (const auto& a : controls) require_order(a, e.dim());
  OperatorSpec spec(OperatorKind::Bellman, e);
  spec.controls_ = std::move(controls);
  spec.control_set_ = set;
  return spec;
}

OperatorSpec OperatorSpec::shifted(const OperatorSpec& base, const SymMatrix& offset, double shift) {
  require_order(offset, base.dim());
  if (!std::isfinite(shift)) throw InvalidInput("shift must be finite");
  OperatorSpec spec(OperatorKind::Shifted, base.ellipticity());
  spec.base_ = std::make_shared<const OperatorSpec>(base);
  spec.offset_ = std::make_shared<const SymMatrix>(offset);
  spec.shift_ = shift;
  return spec;
}

OperatorSpec OperatorSpec::with_rhs(const OperatorSpec& base, double rhs) {
  return shifted(base, SymMatrix::zero(base.dim()), rhs);
}

OperatorSpec OperatorSpec::dual() const {
  OperatorSpec spec(OperatorKind::Dual, ellipticity_);
  spec.base_ = std::make_shared<const OperatorSpec>(*this);
  return spec;
}

double OperatorSpec::evaluate(const SymMatrix& m) const {
  require_order(m, dim());
  switch (kind_) {
    case OperatorKind::PucciPlus:
      return farfield::pucci_plus(m, ellipticity_);
    case OperatorKind::PucciMinus:
      return farfield::pucci_minus(m, ellipticity_);
    case OperatorKind::Laplace:
      return m.trace();
    case OperatorKind::Bellman: {
      double best = -std::numeric_limits<double>::infinity();
      if (control_set_ == ControlSet::Fixed) {
        for (const auto& a : controls_) {
          // trace(A M) for symmetric A, M
          best = std::max(best, a.matrix().cwiseProduct(m.matrix()).sum());
        }
      } else {
        const Eigen::VectorXd mu = m.eigenvalues();
        for (const auto& a : controls_) {
          // Same-order pairing of ascending spectra maximizes trace(R A R^T M).
          best = std::max(best, a.eigenvalues().dot(mu));
        }
      }
      return best;
    }
    case OperatorKind::Shifted:
      return base_->evaluate(m + *offset_) - shift_;
    case OperatorKind::Dual:
      return -base_->evaluate(-m);
  }
  return 0.0;
}

bool OperatorSpec::is_rotation_invariant() const {
  switch (kind_) {
    case OperatorKind::PucciPlus:
    case OperatorKind::PucciMinus:
    case OperatorKind::Laplace:
      return true;
    case OperatorKind::Bellman:
      if (control_set_ == ControlSet::RotationClosed) return true;
      return std::all_of(controls_.begin(), controls_.end(), [](const SymMatrix& a) { return a.is_scalar(); });
    case OperatorKind::Shifted:
      return offset_->is_scalar() && base_->is_rotation_invariant();
    case OperatorKind::Dual:
      return base_->is_rotation_invariant();
  }
  return false;
}

bool OperatorSpec::is_positively_homogeneous() const {
  switch (kind_) {
    case OperatorKind::Shifted:
      return shift_ == 0.0 && offset_->matrix().isZero(0.0) && base_->is_positively_homogeneous();
    case OperatorKind::Dual:
      return base_->is_positively_homogeneous();
    default:
      return true;
  }
}

bool OperatorSpec::is_convex() const {
  switch (kind_) {
    case OperatorKind::PucciPlus:
    case OperatorKind::Laplace:
    case OperatorKind::Bellman:
      return true;
    case OperatorKind::PucciMinus:
      return ellipticity_.lower() == ellipticity_.upper();
    case OperatorKind::Shifted:
      return base_->is_convex();
    case OperatorKind::Dual:
      return base_->is_concave();
  }
  return false;
}

bool OperatorSpec::is_concave() const {
  switch (kind_) {
    case OperatorKind::PucciMinus:
    case OperatorKind::Laplace:
      return true;
    case OperatorKind::PucciPlus:
      return ellipticity_.lower() == ellipticity_.upper();
    case OperatorKind::Bellman:
      return controls_.size() == 1 && (control_set_ == ControlSet::Fixed || controls_.front().is_scalar());
    case OperatorKind::Shifted:
      return base_->is_concave();
    case OperatorKind::Dual:
      return base_->is_convex();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Property checks

SymMatrix random_symmetric(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = normal(rng);
      m(j, i) = m(i, j);
    }
  }
  return SymMatrix(m);
}

SandwichReport check_uniform_ellipticity(const OperatorSpec& f, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
  const Ellipticity& e = f.ellipticity();
  SandwichReport report;
  report.trials = trials;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const SymMatrix m = random_symmetric(e.dim(), std::pow(10.0, log_scale(rng)), rng);
    const SymMatrix n = random_symmetric(e.dim(), std::pow(10.0, log_scale(rng)), rng);
    const double diff = f.evaluate(m + n) - f.evaluate(n);
    const double lo = pucci_minus(m, e);
    const double hi = pucci_plus(m, e);
    const double violation = std::max(lo - diff, diff - hi);
    report.worst_violation = std::max(report.worst_violation, violation);
  }
  report.pass = report.worst_violation <= 1e-10;
  return report;
}

HomogeneityReport check_homogeneity(const OperatorSpec& f, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_t(-2.0, 2.0);
  HomogeneityReport report;
  report.trials = trials;
  for (int k = 0; k < trials; ++k) {
    const SymMatrix m = random_symmetric(f.dim(), 1.0, rng);
    const double t = std::pow(10.0, log_t(rng));
    const double lhs = f.evaluate(t * m);
    const double rhs = t * f.evaluate(m);
    const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    report.worst_relative_error = std::max(report.worst_relative_error, err);
  }
  report.pass = report.worst_relative_error <= 1e-12;
  return report;
}

// ---------------------------------------------------------------------------
// Radial reduction

std::vector<double> RadialSpectrum::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(tangential_multiplicity) + 1);
  v.push_back(radial);
  v.insert(v.end(), static_cast<std::size_t>(tangential_multiplicity), tangential);
  return v;
}

SymMatrix RadialSpectrum::as_matrix() const {
  const auto v = values();
  return SymMatrix::diagonal(v);
}

RadialSpectrum radial_hessian_spectrum(double du, double ddu, double r, int n) {
  if (!(r > 0.0)) throw InvalidInput("radius must be positive");
  if (n < 2) throw InvalidInput("dimension must be at least 2");
  return RadialSpectrum{ddu, du / r, n - 1};
}

}  // namespace farfield
