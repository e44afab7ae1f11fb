#include "farfield/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "farfield/errors.hpp"
#include "farfield/io.hpp"

namespace farfield {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// JSON-safe number: non-finite values become their string form.
nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::Finite:
      return "finite";
    case LimitKind::PlusInfinity:
      return "plus_infinity";
    case LimitKind::MinusInfinity:
      return "minus_infinity";
    case LimitKind::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double slope_of_ratios(const std::vector<double>& r, const std::vector<double>& ratio) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (ratio[i] > 1e-300) {
      x.push_back(std::log(r[i]));
      y.push_back(std::log(ratio[i]));
    }
  }
  if (x.size() < 2) return 0.0;
  return fit_line(x, y).slope;
}

}  // namespace

std::vector<int> dyadic_rings(const GridFunction& u, double r0) {
  std::vector<int> rings;
  const double lo = std::max(r0, u.r_min());
  const double tol = 1e-9 * u.r_max();
  for (double r = lo; r <= u.r_max() + tol; r *= 2.0) {
    const int ring = u.nearest_ring(r);
    if (rings.empty() || rings.back() != ring) rings.push_back(ring);
  }
  return rings;
}

double SphereDeviation::mean() const {
  double s = 0.0;
  for (double v : dev) s += v;
  return dev.empty() ? 0.0 : s / static_cast<double>(dev.size());
}

double SphereDeviation::min() const { return *std::min_element(dev.begin(), dev.end()); }
double SphereDeviation::max() const { return *std::max_element(dev.begin(), dev.end()); }

double SphereDeviation::sup_abs() const {
  double s = 0.0;
  for (double v : dev) s = std::max(s, std::abs(v));
  return s;
}

SphereDeviation sphere_deviation(const GridFunction& u, const Polynomial& p, int ring, int directions) {
  if (p.dim() != u.dim()) throw InvalidInput("sphere_deviation: polynomial and data dimensions differ");
  const SphereData s = u.sphere(ring, directions);
  SphereDeviation d;
  d.radius = s.radius;
  d.points = s.points;
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    d.dev.push_back(s.values[k] - p(s.points[k]));
    d.grad_dev.push_back((s.gradients[k] - p.gradient_at(s.points[k])).norm());
    d.hess_dev.push_back(spectral_norm(s.hessians[k] - p.hessian));
  }
  return d;
}

std::string LimitEstimate::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  j["value"] = num(value);
  j["radii"] = radii;
  j["means"] = means;
  j["oscillations"] = oscillations;
  return j.dump(2);
}

LimitEstimate estimate_limit_at_infinity(const GridFunction& u) { return estimate_limit_at_infinity(u, Polynomial::zero(u.dim())); }

LimitEstimate estimate_limit_at_infinity(const GridFunction& u, const Polynomial& p) {
  LimitEstimate est;
  for (int ring : dyadic_rings(u, 1.0)) {
    const SphereDeviation d = sphere_deviation(u, p, ring);
    est.radii.push_back(d.radius);
    est.means.push_back(d.mean());
    est.oscillations.push_back(d.max() - d.min());
  }
  const std::size_t k = est.means.size();
  if (k < 3) throw InvalidInput("estimate_limit_at_infinity: need at least three dyadic spheres");

  double scale = 1.0;
  for (double m : est.means) scale = std::max(scale, std::abs(m));
  const double tiny = 1e-10 * scale;

  std::vector<double> inc;
  for (std::size_t i = (k > 4 ? k - 4 : 0); i + 1 < k; ++i) inc.push_back(est.means[i + 1] - est.means[i]);
  const double last = inc.back(), prev = inc[inc.size() - 2];
  const double m_last = est.means.back();

  bool up = true, down = true;
  for (double d : inc) {
    up = up && d > tiny;
    down = down && d < -tiny;
  }
  const bool monotone = up || down;
  const double osc_last = est.oscillations.back(), osc_prev = est.oscillations[k - 2];
  const bool osc_ok = osc_last <= 1.05 * osc_prev + tiny;

  auto infinite = [&](bool plus) {
    est.kind = plus ? LimitKind::PlusInfinity : LimitKind::MinusInfinity;
    est.value = plus ? kInf : -kInf;
    return est;
  };

  if (monotone && (std::abs(m_last) > est.divergence_threshold || std::abs(last) >= 0.98 * std::abs(prev))) {
    return infinite(up);
  }
  if (std::abs(last) <= tiny && std::abs(prev) <= tiny) {
    if (!osc_ok) {
      est.value = kNaN;
      return est;
    }
    est.kind = LimitKind::Finite;
    est.value = m_last;
    return est;
  }
  if (std::abs(last) < 0.98 * std::abs(prev) && osc_ok) {
    const double q = last / prev;
    est.kind = LimitKind::Finite;
    est.value = m_last + last * q / (1.0 - q);
    return est;
  }
  est.value = kNaN;
  return est;
}

std::string to_string(DecayModel m) {
  switch (m) {
    case DecayModel::PowerLaw:
      return "power_law";
    case DecayModel::Logarithmic:
      return "logarithmic";
    case DecayModel::Degenerate:
      return "degenerate";
  }
  return "unknown";
}

std::string DecayFit::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = to_string(model);
  j["exponent"] = num(exponent);
  j["amplitude"] = num(amplitude);
  j["r2"] = num(r2);
  j["window"] = {window_lo, window_hi};
  return j.dump(2);
}

DecayFit fit_decay(const std::vector<DecaySample>& samples, double noise_scale) {
  std::vector<DecaySample> s;
  for (const auto& x : samples) {
    if (!(x.r > 0.0) || !std::isfinite(x.deviation)) throw InvalidInput("fit_decay: radii must be positive and deviations finite");
    if (x.r > 1.0) s.push_back(x);
  }
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.r < b.r; });
  if (s.size() < 5) throw InvalidInput("fit_decay: need at least five spheres with r > 1");
  if (s.back().r < 10.0 * s.front().r) throw InvalidInput("fit_decay: spheres must span at least one decade");

  DecayFit fit;
  fit.window_lo = s.front().r;
  fit.window_hi = s.back().r;
  double sup = 0.0;
  for (const auto& x : s) sup = std::max(sup, std::abs(x.deviation));
  if (sup <= 10.0 * std::numeric_limits<double>::epsilon() * noise_scale) {
    fit.model = DecayModel::Degenerate;
    fit.exponent = kNaN;
    return fit;
  }
  for (const auto& x : s) {
    if (std::abs(x.deviation) == 0.0) throw InvalidInput("fit_decay: zero deviation on a sphere of a non-degenerate tail");
  }

  std::vector<double> logr, loglogr, logdev;
  for (const auto& x : s) {
    logr.push_back(std::log(x.r));
    loglogr.push_back(std::log(std::log(x.r)));
    logdev.push_back(std::log(std::abs(x.deviation)));
  }
  const LineFit pw = fit_line(logr, logdev);
  const LineFit lg = fit_line(loglogr, logdev);
  fit.rss_power = pw.rss;
  fit.rss_log = lg.rss;
  const LineFit& best = lg.rss <= 0.8 * pw.rss ? lg : pw;
  fit.model = &best == &lg ? DecayModel::Logarithmic : DecayModel::PowerLaw;
  fit.exponent = best.slope;
  fit.amplitude = std::exp(best.intercept);
  fit.r2 = best.r2;
  return fit;
}

std::string to_string(TailVariant v) {
  switch (v) {
    case TailVariant::Straddle:
      return "straddle";
    case TailVariant::UpSim:
      return "up_sim";
    case TailVariant::DownSim:
      return "down_sim";
    case TailVariant::UpApprox:
      return "up_approx";
    case TailVariant::DownApprox:
      return "down_approx";
  }
  return "unknown";
}

std::string TailClass::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = variant ? to_string(*variant) : "inconclusive";
  j["a"] = a ? num(*a) : nlohmann::ordered_json(nullptr);
  j["u_infinity"] = nlohmann::ordered_json::parse(u_infinity.to_json());
  auto& rows = j["spheres"] = nlohmann::ordered_json::array();
  for (const auto& s : spheres) {
    rows.push_back({{"r", s.radius},
                    {"min_dev", s.min_dev},
                    {"max_dev", s.max_dev},
                    {"ratio_phi", num(s.ratio_phi)},
                    {"ratio_phi_tilde", num(s.ratio_phi_tilde)}});
  }
  return j.dump(2);
}

TailClass classify_tail(const GridFunction& u, const Polynomial& p, const RadialTail& phi, const RadialTail& phi_tilde) {
  TailClass out;
  out.u_infinity = estimate_limit_at_infinity(u, p);
  const bool finite = out.u_infinity.finite();
  const double shift = finite ? out.u_infinity.value : 0.0;
  const RadialTail down = phi_tilde.negated();

  struct Ratios {
    double lo = kInf, hi = -kInf, mean = 0.0;
  };
  auto ratios = [&](const SphereDeviation& d, const RadialTail& t) {
    Ratios r;
    const double base = t.value(d.radius);
    for (double v : d.dev) {
      const double q = (v - shift) / base;
      r.lo = std::min(r.lo, q);
      r.hi = std::max(r.hi, q);
      r.mean += q;
    }
    r.mean /= static_cast<double>(d.dev.size());
    return r;
  };

  const std::vector<int> rings = dyadic_rings(u, 1.0);
  const double r_last = u.ring_radius(rings.back());
  bool straddles = true;
  double scale = 1.0;
  std::vector<SphereDeviation> devs;
  for (int ring : rings) {
    devs.push_back(sphere_deviation(u, p, ring));
    for (double v : devs.back().dev) scale = std::max(scale, std::abs(v));
  }
  const double slack = 1e-9 * scale;

  bool phi_stable = true, down_stable = true;
  Ratios last_phi, last_down;
  for (const auto& d : devs) {
    if (finite && (d.min() > shift + slack || d.max() < shift - slack)) straddles = false;
    if (d.radius < 2.0) continue;
    const Ratios rp = ratios(d, phi), rd = ratios(d, down);
    TailSphere ts;
    ts.radius = d.radius;
    ts.min_dev = d.min();
    ts.max_dev = d.max();
    ts.ratio_phi = rp.mean;
    ts.ratio_phi_tilde = rd.mean;
    ts.ratio_phi_spread = rp.hi - rp.lo;
    ts.ratio_phi_tilde_spread = rd.hi - rd.lo;
    out.spheres.push_back(ts);
    last_phi = rp;
    last_down = rd;
  }
  if (out.spheres.empty()) return out;

  const double a_phi = last_phi.mean, a_down = last_down.mean;
  for (const auto& d : devs) {
    if (d.radius < 2.0 || d.radius < r_last / 10.0 - 1e-9) continue;
    const Ratios rp = ratios(d, phi), rd = ratios(d, down);
    phi_stable = phi_stable && a_phi > 0.0 && rp.lo >= 0.95 * a_phi && rp.hi <= 1.05 * a_phi;
    down_stable = down_stable && a_down > 0.0 && rd.lo >= 0.95 * a_down && rd.hi <= 1.05 * a_down;
  }

  const bool alpha_pos = phi.decays(), alpha_tilde_pos = phi_tilde.decays();
  if (finite) {
    if (phi_stable && alpha_pos) {
      out.variant = TailVariant::UpSim;
      out.a = a_phi;
    } else if (down_stable && alpha_tilde_pos) {
      out.variant = TailVariant::DownSim;
      out.a = a_down;
    } else if (straddles) {
      out.variant = TailVariant::Straddle;
    }
    return out;
  }
  if (out.u_infinity.kind == LimitKind::Inconclusive) return out;
  if (phi_stable && !alpha_pos) {
    out.variant = TailVariant::UpApprox;
    out.a = a_phi;
  } else if (down_stable && !alpha_tilde_pos) {
    out.variant = TailVariant::DownApprox;
    out.a = a_down;
  }
  return out;
}

std::string sphere_csv(const std::vector<SphereRow>& rows) {
  CsvTable t;
  t.schema = "spheres";
  t.columns = {"r", "sup_dev", "grad_dev", "hess_dev", "envelope", "ratio_phi", "ratio_phi_tilde"};
  for (const auto& r : rows) {
    t.rows.push_back({r.r, r.sup_dev, r.grad_dev, r.hess_dev, r.envelope, r.ratio_phi, r.ratio_phi_tilde});
  }
  return t.to_string();
}

double decay_envelope(const Ellipticity& e, double r) {
  if (!(r > 0.0)) throw InvalidInput("decay_envelope: r must be positive");
  if (decay_case(e) == DecayCase::Logarithmic) return std::log(r);
  return std::pow(r, 1.0 - (e.dim() - 1) * e.lower() / e.upper());
}

std::string DecayBoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["c0"] = num(c0);
  j["c1"] = num(c1);
  j["c2"] = num(c2);
  j["slope0"] = num(slope0);
  j["slope1"] = num(slope1);
  j["slope2"] = num(slope2);
  j["no_growth"] = no_growth;
  return j.dump(2);
}

DecayBoundReport verify_decay_bounds(const GridFunction& u, const Polynomial& p, const Ellipticity& e,
                                     const DecayBoundOptions& options, const RadialTail* phi,
                                     const RadialTail* phi_tilde) {
  if (e.dim() != u.dim()) throw InvalidInput("verify_decay_bounds: ellipticity and data dimensions differ");
  DecayBoundReport rep;
  const double lo = options.trend_lo > 0.0 ? options.trend_lo : u.r_max() / 10.0;
  const double hi = options.trend_hi > 0.0 ? options.trend_hi : u.r_max();
  std::vector<double> tr, t0, t1, t2;
  for (int ring : dyadic_rings(u, 1.0)) {
    const SphereDeviation d = sphere_deviation(u, p, ring, options.directions);
    SphereRow row;
    row.r = d.radius;
    row.sup_dev = d.sup_abs();
    row.grad_dev = *std::max_element(d.grad_dev.begin(), d.grad_dev.end());
    row.hess_dev = options.include_hessian ? *std::max_element(d.hess_dev.begin(), d.hess_dev.end()) : kNaN;
    row.envelope = decay_envelope(e, d.radius);
    row.ratio_phi = phi ? d.mean() / phi->value(d.radius) : kNaN;
    row.ratio_phi_tilde = phi_tilde ? d.mean() / phi_tilde->negated().value(d.radius) : kNaN;
    rep.rows.push_back(row);
    if (!(row.envelope > 0.0)) continue;
    const double q0 = row.sup_dev / row.envelope;
    const double q1 = row.grad_dev * row.r / row.envelope;
    const double q2 = options.include_hessian ? row.hess_dev * row.r * row.r / row.envelope : 0.0;
    if (row.r >= 2.0 - 1e-9) rep.c0 = std::max(rep.c0, q0);
    if (row.r >= 4.0 - 1e-9) {
      rep.c1 = std::max(rep.c1, q1);
      rep.c2 = std::max(rep.c2, q2);
    }
    if (row.r >= lo - 1e-9 && row.r <= hi + 1e-9) {
      tr.push_back(row.r);
      t0.push_back(q0);
      t1.push_back(q1);
      t2.push_back(q2);
    }
  }
  rep.slope0 = slope_of_ratios(tr, t0);
  rep.slope1 = slope_of_ratios(tr, t1);
  rep.slope2 = options.include_hessian ? slope_of_ratios(tr, t2) : 0.0;
  rep.no_growth = rep.slope0 <= options.max_slope && rep.slope1 <= options.max_slope &&
                  (!options.include_hessian || rep.slope2 <= options.max_slope);
  return rep;
}

std::vector<double> harnack_ratio(const GridFunction& u, const std::vector<double>& radii, int directions) {
  std::vector<double> out;
  for (double r : radii) {
    const SphereData s = u.sphere(u.nearest_ring(r), directions);
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    if (!(*mn > 0.0)) throw InvalidInput("harnack_ratio: function is not positive on a tested sphere");
    out.push_back(*mx / *mn);
  }
  return out;
}

}  // namespace farfield
