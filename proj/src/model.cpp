#include "jumprate/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jumprate {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Upper tail of the standard normal, accurate far into the tail.
double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

void validate_dates(const std::vector<double>& dates, const char* what) {
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!(dates[i] > 0.0) || !std::isfinite(dates[i])) {
      throw ModelError(std::string(what) + ": dates must be positive and finite");
    }
    if (i > 0 && !(dates[i] > dates[i - 1])) {
      throw ModelError(std::string(what) + ": dates must be strictly increasing");
    }
  }
}

void validate_law(const JumpDistribution& law) {
  std::visit(overloaded{[](const GaussianJump& g) {
                          if (!(g.stdev >= 0.0) || !std::isfinite(g.mean)) {
                            throw ModelError("gaussian jump: stdev must be >= 0");
                          }
                        },
                        [](const TwoPointJump& d) {
                          if (!(d.prob_up >= 0.0 && d.prob_up <= 1.0) || !std::isfinite(d.size)) {
                            throw ModelError("two-point jump: probability must lie in [0, 1]");
                          }
                        }},
             law);
}

constexpr double kDateTol = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec ModelSpec::vasicek(double alpha, double beta, double sigma) {
  if (!(sigma > 0.0)) throw ModelError("vasicek: sigma must be positive");
  if (beta == 0.0 || !std::isfinite(beta)) throw ModelError("vasicek: beta must be non-zero");
  return ModelSpec(ConstantVasicek{alpha, beta, sigma});
}

ModelSpec ModelSpec::affine(TimeFunction alpha, TimeFunction beta, TimeFunction gamma,
                            TimeFunction delta) {
  if (!alpha || !beta || !gamma || !delta) throw ModelError("affine: all coefficients required");
  return ModelSpec(TimeDependentAffine{std::move(alpha), std::move(beta), std::move(gamma),
                                       std::move(delta)});
}

ModelSpec ModelSpec::general(StateFunction drift, StateFunction volatility) {
  if (!drift || !volatility) throw ModelError("general: drift and volatility required");
  return ModelSpec(GeneralSde{std::move(drift), std::move(volatility)});
}

bool ModelSpec::is_affine() const noexcept { return !std::holds_alternative<GeneralSde>(kind_); }

const ConstantVasicek* ModelSpec::as_vasicek() const noexcept {
  return std::get_if<ConstantVasicek>(&kind_);
}

const ConstantVasicek& ModelSpec::require_vasicek(const char* who) const {
  if (const auto* v = as_vasicek()) return *v;
  throw ModelError(std::string(who) + ": requires a constant-coefficient Vasicek model");
}

double ModelSpec::alpha(double t) const {
  return std::visit(overloaded{[](const ConstantVasicek& v) { return v.alpha; },
                               [t](const TimeDependentAffine& a) { return a.alpha(t); },
                               [](const GeneralSde&) -> double {
                                 throw ModelError("alpha: model is not affine");
                               }},
                    kind_);
}

double ModelSpec::beta(double t) const {
  return std::visit(overloaded{[](const ConstantVasicek& v) { return v.beta; },
                               [t](const TimeDependentAffine& a) { return a.beta(t); },
                               [](const GeneralSde&) -> double {
                                 throw ModelError("beta: model is not affine");
                               }},
                    kind_);
}

double ModelSpec::gamma(double t) const {
  return std::visit(overloaded{[](const ConstantVasicek& v) { return v.sigma * v.sigma; },
                               [t](const TimeDependentAffine& a) { return a.gamma(t); },
                               [](const GeneralSde&) -> double {
                                 throw ModelError("gamma: model is not affine");
                               }},
                    kind_);
}

double ModelSpec::delta(double t) const {
  return std::visit(overloaded{[](const ConstantVasicek&) { return 0.0; },
                               [t](const TimeDependentAffine& a) { return a.delta(t); },
                               [](const GeneralSde&) -> double {
                                 throw ModelError("delta: model is not affine");
                               }},
                    kind_);
}

double ModelSpec::drift(double t, double x) const {
  return std::visit(
      overloaded{[x](const ConstantVasicek& v) { return v.alpha + v.beta * x; },
                 [t, x](const TimeDependentAffine& a) { return a.alpha(t) + a.beta(t) * x; },
                 [t, x](const GeneralSde& g) { return g.drift(t, x); }},
      kind_);
}

double ModelSpec::variance(double t, double x) const {
  const double v = std::visit(
      overloaded{[](const ConstantVasicek& m) { return m.sigma * m.sigma; },
                 [t, x](const TimeDependentAffine& a) { return a.gamma(t) + a.delta(t) * x; },
                 [t, x](const GeneralSde& g) {
                   const double s = g.volatility(t, x);
                   return s * s;
                 }},
      kind_);
  if (!(v >= 0.0)) {
    std::ostringstream os;
    os << "volatility undefined at (t=" << t << ", x=" << x << "): gamma + delta x < 0";
    throw ModelError(os.str());
  }
  return v;
}

double ModelSpec::volatility(double t, double x) const {
  if (const auto* g = std::get_if<GeneralSde>(&kind_)) {
    const double s = g->volatility(t, x);
    if (!(s >= 0.0)) throw ModelError("volatility must be non-negative");
    return s;
  }
  return std::sqrt(variance(t, x));
}

// ---------------------------------------------------------------------------
// Jump laws

JumpDistribution gaussian_jump(double mean, double stdev) {
  JumpDistribution law = GaussianJump{mean, stdev};
  validate_law(law);
  return law;
}

JumpDistribution two_point_jump(double size, double prob_up) {
  JumpDistribution law = TwoPointJump{size, prob_up};
  validate_law(law);
  return law;
}

double log_mgf_neg(const JumpDistribution& law, double b) {
  return std::visit(
      overloaded{[b](const GaussianJump& g) {
                   return -g.mean * b + 0.5 * g.stdev * g.stdev * b * b;
                 },
                 [b](const TwoPointJump& d) {
                   // log(p e^u + (1 - p) e^v), u = -m b, v = m b
                   const double u = -d.size * b;
                   const double v = d.size * b;
                   if (d.prob_up <= 0.0) return v;
                   if (d.prob_up >= 1.0) return u;
                   const double top = std::max(u, v);
                   return top + std::log(d.prob_up * std::exp(u - top) +
                                         (1.0 - d.prob_up) * std::exp(v - top));
                 }},
      law);
}

double jump_mass_outside(const JumpDistribution& law, double lo, double hi, double x_min,
                         double x_max) {
  constexpr int kProbe = 33;
  double worst = 0.0;
  for (int k = 0; k < kProbe; ++k) {
    const double x = x_min + (x_max - x_min) * k / (kProbe - 1);
    const double out = std::visit(
        overloaded{[&](const GaussianJump& g) {
                     const double c = x + g.mean;
                     if (g.stdev == 0.0) return (c < lo || c > hi) ? 1.0 : 0.0;
                     return normal_sf((c - lo) / g.stdev) + normal_sf((hi - c) / g.stdev);
                   },
                   [&](const TwoPointJump& d) {
                     double m = 0.0;
                     if (x + d.size < lo || x + d.size > hi) m += d.prob_up;
                     if (x - d.size < lo || x - d.size > hi) m += 1.0 - d.prob_up;
                     return m;
                   }},
        law);
    worst = std::max(worst, out);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Timeline

Timeline merge_relevant_dates(std::vector<RateJump> rate_jumps, std::vector<double> rollovers,
                              double maturity) {
  if (!(maturity > 0.0) || !std::isfinite(maturity)) {
    throw ModelError("timeline: maturity must be positive");
  }
  std::vector<double> jump_times;
  jump_times.reserve(rate_jumps.size());
  for (const auto& j : rate_jumps) {
    validate_law(j.law);
    jump_times.push_back(j.time);
  }
  validate_dates(jump_times, "rate jumps");
  validate_dates(rollovers, "roll-overs");

  const double cutoff = maturity + kDateTol * std::max(1.0, maturity);
  std::erase_if(rate_jumps, [cutoff](const RateJump& j) { return j.time > cutoff; });
  std::erase_if(rollovers, [cutoff](double t) { return t > cutoff; });

  Timeline tl;
  std::size_t i = 0;
  std::size_t n = 0;
  while (i < rate_jumps.size() || n < rollovers.size()) {
    const bool have_jump = i < rate_jumps.size();
    const bool have_roll = n < rollovers.size();
    if (have_jump && have_roll && std::abs(rate_jumps[i].time - rollovers[n]) <= kDateTol) {
      tl.relevant_.push_back({rate_jumps[i].time, DateKind::Both, rate_jumps[i].law});
      ++i;
      ++n;
    } else if (have_jump && (!have_roll || rate_jumps[i].time < rollovers[n])) {
      tl.relevant_.push_back({rate_jumps[i].time, DateKind::RateJumpOnly, rate_jumps[i].law});
      ++i;
    } else {
      tl.relevant_.push_back({rollovers[n], DateKind::RolloverOnly, std::nullopt});
      ++n;
    }
  }
  tl.jumps_ = std::move(rate_jumps);
  tl.rollovers_ = std::move(rollovers);
  tl.maturity_ = maturity;
  return tl;
}

std::vector<double> Timeline::breakpoints() const {
  std::vector<double> out{0.0};
  for (const auto& r : relevant_) out.push_back(r.time);
  if (maturity_ - out.back() > kDateTol * std::max(1.0, maturity_)) out.push_back(maturity_);
  return out;
}

double Timeline::longest_interval() const {
  const auto bp = breakpoints();
  double longest = 0.0;
  for (std::size_t k = 1; k < bp.size(); ++k) longest = std::max(longest, bp[k] - bp[k - 1]);
  return longest;
}

bool Timeline::has_common_dates() const {
  return std::any_of(relevant_.begin(), relevant_.end(),
                     [](const RelevantDate& r) { return r.kind == DateKind::Both; });
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(Eigen::VectorXd xs, Eigen::VectorXd vals)
    : xs_(std::move(xs)), vals_(std::move(vals)) {
  const Eigen::Index n = xs_.size();
  if (n < 3) throw ModelError("grid function: at least 3 nodes required");
  if (vals_.size() != n) throw ModelError("grid function: node/value length mismatch");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw ModelError("grid function: nodes must be increasing");
  }
  dx_ = (xs_[n - 1] - xs_[0]) / static_cast<double>(n - 1);
  // Spacing tolerance admits rounding of lattice nodes k * dx.
  const double slack = 1e-12 * dx_ + 4.0 * std::numeric_limits<double>::epsilon() *
                                         xs_.cwiseAbs().maxCoeff();
  uniform_ = true;
  for (Eigen::Index i = 1; i < n && uniform_; ++i) {
    uniform_ = std::abs((xs_[i] - xs_[i - 1]) - dx_) <= slack;
  }
}

GridFunction GridFunction::with_values(Eigen::VectorXd vals) const {
  if (vals.size() != xs_.size()) throw ModelError("grid function: node/value length mismatch");
  GridFunction out = *this;
  out.vals_ = std::move(vals);
  return out;
}

Eigen::VectorXd uniform_nodes(double lo, double hi, double dx) {
  if (!(dx > 0.0) || !(hi > lo)) throw ModelError("uniform grid: need dx > 0 and hi > lo");
  const auto k_lo = static_cast<long long>(std::floor(lo / dx + 1e-9));
  const auto k_hi = static_cast<long long>(std::ceil(hi / dx - 1e-9));
  const Eigen::Index n = static_cast<Eigen::Index>(k_hi - k_lo + 1);
  Eigen::VectorXd xs(n);
  for (Eigen::Index i = 0; i < n; ++i) xs[i] = static_cast<double>(k_lo + i) * dx;
  return xs;
}

// ---------------------------------------------------------------------------
// Jump conditions

namespace {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& xs) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd w(n);
  w[0] = 0.5 * (xs[1] - xs[0]);
  w[n - 1] = 0.5 * (xs[n - 1] - xs[n - 2]);
  for (Eigen::Index j = 1; j + 1 < n; ++j) w[j] = 0.5 * (xs[j + 1] - xs[j - 1]);
  return w;
}

// E[g(x_i + xi)], xi ~ N(m, s^2), by trapezoidal quadrature of g(x_j) phi(x_j - x_i)
// over the grid; mass outside the grid is neglected.
Eigen::VectorXd gaussian_trapezoid(const Eigen::VectorXd& xs, const Eigen::VectorXd& g, double m,
                                   double s) {
  const Eigen::Index n = xs.size();
  const Eigen::VectorXd w = trapezoid_weights(xs);
  const double reach = 40.0 * s;
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  const double inv2s2 = 0.5 / (s * s);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = xs[i] + m;
    const auto* first = std::lower_bound(xs.data(), xs.data() + n, c - reach);
    const auto* last = std::upper_bound(xs.data(), xs.data() + n, c + reach);
    double acc = 0.0;
    for (const double* p = first; p != last; ++p) {
      const Eigen::Index j = p - xs.data();
      const double d = xs[j] - c;
      acc += w[j] * g[j] * std::exp(-d * d * inv2s2);
    }
    out[i] = norm * acc;
  }
  return out;
}

// Same expectation with g replaced by its piecewise-linear interpolant and the
// Gaussian integrated exactly on every cell. Used when the density is narrower
// than the grid can resolve; degenerates to linear interpolation as s -> 0.
Eigen::VectorXd gaussian_product_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& g,
                                        double m, double s) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = xs[i] + m;
    if (s == 0.0) {
      if (c < xs[0] || c > xs[n - 1]) continue;
      const auto* p = std::upper_bound(xs.data(), xs.data() + n, c);
      Eigen::Index j = std::clamp<Eigen::Index>((p - xs.data()) - 1, 0, n - 2);
      const double lam = (c - xs[j]) / (xs[j + 1] - xs[j]);
      out[i] = (1.0 - lam) * g[j] + lam * g[j + 1];
      continue;
    }
    const double reach = 12.0 * s;
    const auto* p_lo = std::upper_bound(xs.data(), xs.data() + n, c - reach);
    const auto* p_hi = std::lower_bound(xs.data(), xs.data() + n, c + reach);
    const Eigen::Index j0 = std::max<Eigen::Index>(0, (p_lo - xs.data()) - 1);
    const Eigen::Index j1 = std::min<Eigen::Index>(n - 1, p_hi - xs.data());
    double acc = 0.0;
    for (Eigen::Index j = j0; j < j1; ++j) {
      const double a = xs[j];
      const double b = xs[j + 1];
      const double za = (a - c) / s;
      const double zb = (b - c) / s;
      const double mass = (za >= 0.0) ? normal_sf(za) - normal_sf(zb)
                                      : normal_sf(-zb) - normal_sf(-za);
      const double first_moment = s * (normal_pdf(za) - normal_pdf(zb));
      const double slope = (g[j + 1] - g[j]) / (b - a);
      acc += g[j] * mass + slope * (first_moment + (c - a) * mass);
    }
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd two_point_shift(const GridFunction& f, const Eigen::VectorXd& g,
                                const TwoPointJump& d) {
  if (!f.uniform()) throw ModelError("two-point jump condition requires a uniform grid");
  const double shift = d.size / f.dx();
  const double c = std::round(shift);
  if (std::abs(d.size - c * f.dx()) > 1e-9 * std::max(std::abs(d.size), f.dx())) {
    std::ostringstream os;
    os << "two-point jump size " << d.size << " is not a multiple of dx = " << f.dx();
    throw ModelError(os.str());
  }
  const auto offset = static_cast<Eigen::Index>(c);
  const Eigen::Index n = g.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index up = std::clamp<Eigen::Index>(i + offset, 0, n - 1);
    const Eigen::Index down = std::clamp<Eigen::Index>(i - offset, 0, n - 1);
    out[i] = d.prob_up * g[up] + (1.0 - d.prob_up) * g[down];
  }
  return out;
}

}  // namespace

GridFunction apply_jump_condition(const GridFunction& f_after, DateKind kind,
                                  const std::optional<JumpDistribution>& law) {
  const Eigen::VectorXd& xs = f_after.xs();
  const Eigen::VectorXd discounted =
      f_after.vals().array() * (-xs.array()).exp();
  if (kind == DateKind::RolloverOnly) return f_after.with_values(discounted);

  if (!law) throw ModelError("rate-jump date without a jump distribution");
  const Eigen::VectorXd& g = (kind == DateKind::Both) ? discounted : f_after.vals();

  Eigen::VectorXd out = std::visit(
      overloaded{[&](const GaussianJump& gj) -> Eigen::VectorXd {
                   const double widest = (xs.tail(xs.size() - 1) - xs.head(xs.size() - 1))
                                             .maxCoeff();
                   if (gj.stdev >= 2.0 * widest) {
                     return gaussian_trapezoid(xs, g, gj.mean, gj.stdev);
                   }
                   return gaussian_product_linear(xs, g, gj.mean, gj.stdev);
                 },
                 [&](const TwoPointJump& d) -> Eigen::VectorXd {
                   return two_point_shift(f_after, g, d);
                 }},
      *law);
  return f_after.with_values(std::move(out));
}

}  // namespace jumprate
