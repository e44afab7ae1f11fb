#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace farfield {

/// Ellipticity constants 0 < lower <= upper and the space dimension n >= 2.
class Ellipticity {
 public:
  Ellipticity(double lower, double upper, int dim);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  int dim() const noexcept { return dim_; }
  double ratio() const noexcept { return upper_ / lower_; }

  bool operator==(const Ellipticity&) const = default;

 private:
  double lower_;
  double upper_;
  int dim_;
};

/// Exactly symmetric real matrix. Construction symmetrizes (M + M^T)/2 after
/// checking the input is symmetric to a relative 1e-10.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);

  int order() const noexcept { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  /// Ascending real spectrum.
  Eigen::VectorXd eigenvalues() const;

  /// True when every eigenvalue lies in [lo - tol, hi + tol].
  bool spectrum_within(double lo, double hi, double tol = 1e-12) const;

  /// True when the matrix equals c*I for some c, to tolerance tol.
  bool is_scalar(double tol = 1e-12) const;

  SymMatrix operator-() const;
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double t, const SymMatrix& a);

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

/// Eigenvalues within this distance of zero contribute nothing to the Pucci sums.
inline constexpr double kEigenvalueZeroTol = 1e-12;

double pucci_plus(std::span<const double> eigenvalues, double lower, double upper);
double pucci_minus(std::span<const double> eigenvalues, double lower, double upper);

/// M+(M) = upper * (sum of positive eigenvalues) + lower * (sum of negative ones).
double pucci_plus(const SymMatrix& m, const Ellipticity& e);
/// M-(M) = lower * (sum of positive eigenvalues) + upper * (sum of negative ones).
double pucci_minus(const SymMatrix& m, const Ellipticity& e);

enum class OperatorKind { PucciPlus, PucciMinus, Laplace, Bellman, Shifted, Dual };

/// How a Bellman control list is read.
///  - Fixed: sup over the listed matrices A_k of trace(A_k M).
///  - RotationClosed: sup over all rotations R A_k R^T of the listed matrices, which
///    depends only on each control's spectrum and yields a rotation-invariant operator.
enum class ControlSet { Fixed, RotationClosed };

/// Immutable description of a fully nonlinear operator F(D^2 u).
///
/// Shifted(base, offset, shift) evaluates base(M + offset) - shift, which covers both a
/// right-hand side A (offset 0, shift A) and a translated operator F(M + D^2 P) - A.
/// Dual(base) evaluates -base(-M).
class OperatorSpec {
 public:
  static OperatorSpec pucci_plus(const Ellipticity& e);
  static OperatorSpec pucci_minus(const Ellipticity& e);
  /// Laplacian in dimension n; carries ellipticity (1, 1, n).
  static OperatorSpec laplace(int n);
  /// Rejects an empty list, mismatched orders, or a control with spectrum outside
  /// [lower, upper].
  static OperatorSpec bellman(const Ellipticity& e, std::vector<SymMatrix> controls,
                              ControlSet set = ControlSet::Fixed);
  /// Like bellman() but skips the spectrum check; used to build counterexamples for
  /// the ellipticity diagnostics.
  static OperatorSpec bellman_unchecked(const Ellipticity& e, std::vector<SymMatrix> controls,
                                        ControlSet set = ControlSet::Fixed);
  static OperatorSpec shifted(const OperatorSpec& base, const SymMatrix& offset, double shift);
  /// Right-hand side form: base(M) - rhs.
  static OperatorSpec with_rhs(const OperatorSpec& base, double rhs);

  /// The dual operator -F(-M).
  OperatorSpec dual() const;

  double evaluate(const SymMatrix& m) const;

  OperatorKind kind() const noexcept { return kind_; }
  const Ellipticity& ellipticity() const noexcept { return ellipticity_; }
  int dim() const noexcept { return ellipticity_.dim(); }
  const std::vector<SymMatrix>& controls() const noexcept { return controls_; }
  ControlSet control_set() const noexcept { return control_set_; }
  /// Only meaningful for Shifted.
  const SymMatrix& offset() const { return *offset_; }
  double shift() const noexcept { return shift_; }
  /// Nested operator for Shifted and Dual; null otherwise.
  const OperatorSpec* base() const noexcept { return base_.get(); }

  /// F(Q^T M Q) = F(M) for every rotation Q.
  bool is_rotation_invariant() const;
  /// Structural check: no Shifted layer with a nonzero offset or shift.
  bool is_positively_homogeneous() const;
  /// Convex in M (a supremum of affine functions).
  bool is_convex() const;
  /// Concave in M (an infimum of affine functions).
  bool is_concave() const;

 private:
  OperatorSpec(OperatorKind kind, const Ellipticity& e) : kind_(kind), ellipticity_(e) {}

  OperatorKind kind_;
  Ellipticity ellipticity_;
  std::vector<SymMatrix> controls_;
  ControlSet control_set_ = ControlSet::Fixed;
  std::shared_ptr<const SymMatrix> offset_;
  double shift_ = 0.0;
  std::shared_ptr<const OperatorSpec> base_;
};

struct SandwichReport {
  bool pass = true;
  /// Largest amount by which F(M+N) - F(N) left [M-(M), M+(M)]; <= 0 when it never did.
  double worst_violation = 0.0;
  int trials = 0;
};

/// Samples (M, N) pairs and checks M-(M) <= F(M+N) - F(N) <= M+(M) up to 1e-10,
/// using F's own ellipticity constants.
SandwichReport check_uniform_ellipticity(const OperatorSpec& f, int trials, std::uint64_t seed);

struct HomogeneityReport {
  bool pass = true;
  double worst_relative_error = 0.0;
  int trials = 0;
};

/// Samples t > 0 and M and checks F(tM) = t F(M) to relative 1e-12.
HomogeneityReport check_homogeneity(const OperatorSpec& f, int trials, std::uint64_t seed);

/// Spectrum of D^2 u for a radial u(|x|): u'' once and u'/r with multiplicity n-1.
struct RadialSpectrum {
  double radial = 0.0;
  double tangential = 0.0;
  int tangential_multiplicity = 0;

  std::vector<double> values() const;
  SymMatrix as_matrix() const;
};

RadialSpectrum radial_hessian_spectrum(double du, double ddu, double r, int n);

/// Random symmetric matrix with independent N(0, scale^2) entries above the diagonal.
SymMatrix random_symmetric(int n, double scale, std::mt19937_64& rng);

}  // namespace farfield
