#include "jumprate/localization.hpp"

#include "jumprate/green.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jumprate {

namespace {

constexpr int kProbePoints = 33;
constexpr double kMaxWidth = 50.0;
constexpr double kResolution = 1e-3;

double probe(double x_min, double x_max, int k) {
  if (kProbePoints == 1 || x_max == x_min) return x_min;
  return x_min + (x_max - x_min) * k / (kProbePoints - 1);
}

// Smallest w in [0, kMaxWidth] (to kResolution) with ok(w); ok is monotone.
template <typename Pred>
double bisect_width(Pred ok, const char* what) {
  if (ok(0.0)) return 0.0;
  if (!ok(kMaxWidth)) {
    throw ModelError(std::string("localize_domain: ") + what +
                     " condition not met within 50 rate units");
  }
  double lo = 0.0;
  double hi = kMaxWidth;
  while (hi - lo > kResolution) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> interval_lengths(const Timeline& timeline, double horizon) {
  std::vector<double> cuts{0.0};
  for (const RelevantDate& d : timeline.relevant()) {
    if (d.time > 0.0 && d.time < horizon) cuts.push_back(d.time);
  }
  cuts.push_back(horizon);
  std::vector<double> lengths;
  for (std::size_t i = 1; i < cuts.size(); ++i) lengths.push_back(cuts[i] - cuts[i - 1]);
  return lengths;
}

double longest(const Timeline& timeline, double horizon) {
  const auto lengths = interval_lengths(timeline, horizon);
  return *std::max_element(lengths.begin(), lengths.end());
}

double max_jump_mass(const Timeline& timeline, double lo, double hi, double x_min, double x_max) {
  double worst = 0.0;
  for (const RateJump& j : timeline.rate_jumps()) {
    if (std::holds_alternative<GaussianJump>(j.law)) {
      worst = std::max(worst, jump_mass_outside(j.law, lo, hi, x_min, x_max));
    }
  }
  return worst;
}

double two_point_width(const Timeline& timeline) {
  double w = 0.0;
  for (const RateJump& j : timeline.rate_jumps()) {
    if (const auto* tp = std::get_if<TwoPointJump>(&j.law)) w = std::max(w, 3.0 * std::abs(tp->size));
  }
  return w;
}

void check_region(double x_min, double x_max, double horizon) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)) || x_min > x_max) {
    throw ModelError("localize_domain: requires x_min <= x_max");
  }
  if (!(horizon > 0.0)) throw ModelError("localize_domain: horizon must be positive");
}

// Stationary mean and standard deviation at t = 0 of the mean-reverting
// diffusion, widened by 8 stdev; the drift is linearised around x = 0.
DomainCertificate heuristic_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                   double x_max) {
  double a = 0.0;
  double b = 0.0;
  double s2 = 0.0;
  if (model.is_affine()) {
    a = model.alpha(0.0);
    b = model.beta(0.0);
    s2 = std::max(model.gamma(0.0), 0.0);
  } else {
    constexpr double h = 1e-4;
    a = model.drift(0.0, 0.0);
    b = (model.drift(0.0, h) - model.drift(0.0, -h)) / (2.0 * h);
    s2 = std::pow(model.volatility(0.0, 0.0), 2);
  }
  double centre = 0.5 * (x_min + x_max);
  double spread = std::sqrt(s2);
  if (b < 0.0) {
    centre = -a / b;
    spread = std::sqrt(s2 / (-2.0 * b));
  }
  const double width = 8.0 * spread;
  DomainCertificate c;
  c.x_min = x_min;
  c.x_max = x_max;
  c.M = width;
  c.M_bar = two_point_width(timeline);
  const double pad = std::max(c.M, c.M_bar);
  c.a_lo = std::min(x_min, centre - width) - pad;
  c.a_hi = std::max(x_max, centre + width) + pad;
  c.eps_kernel = std::nan("");
  c.eps_jump = max_jump_mass(timeline, c.a_lo, c.a_hi, x_min, x_max);
  c.heuristic = true;
  c.note = "heuristic: stationary range +/- 8 stdev";
  return c;
}

}  // namespace

double kernel_mass_exact(const ConstantVasicek& model, double tau) {
  return GreenKernel<double>(model).weighted_mass(tau);
}

double kernel_mass(const ConstantVasicek& model, double t, double s, double x, double lo,
                   double hi) {
  if (!(s > t)) throw ModelError("kernel_mass: requires s > t");
  if (!(lo < hi)) throw ModelError("kernel_mass: requires lo < hi");
  const GreenKernel<double> kernel(model);
  const auto h = kernel.horizon(s - t);
  const double sd = std::sqrt(h.var);
  const double slope = h.slope + 1.0 / model.beta;
  // Centre of the Gaussian after completing the square in xi.
  const double centre = h.mean(x) + slope * h.var;
  const double a = std::max(lo, centre - 40.0 * sd);
  const double b = std::min(hi, centre + 40.0 * sd);
  if (!(a < b)) return 0.0;
  const long n = std::clamp(static_cast<long>(std::ceil((b - a) / (sd / 16.0))), 64L, 4000000L);
  const double step = (b - a) / static_cast<double>(n);
  double sum = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double xi = a + step * static_cast<double>(i);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::exp(GreenKernel<double>::log_eval(h, x, xi) + (xi - x) / model.beta);
  }
  return sum * step;
}

double kernel_deviation(const ConstantVasicek& model, double tau, double x_min, double x_max,
                        double lo, double hi) {
  const double exact = kernel_mass_exact(model, tau);
  double worst = 0.0;
  for (int k = 0; k < kProbePoints; ++k) {
    const double x = probe(x_min, x_max, k);
    worst = std::max(worst, std::abs(kernel_mass(model, 0.0, tau, x, lo, hi) - exact));
  }
  return worst;
}

DomainCertificate localize_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                  double x_max, double horizon, LocalizationTolerances tol) {
  check_region(x_min, x_max, horizon);
  if (!(tol.kernel > 0.0 && tol.kernel <= 1e-2) || !(tol.jump > 0.0 && tol.jump <= 1e-2)) {
    throw ModelError("localize_domain: tolerances must lie in (0, 1e-2]");
  }
  const ConstantVasicek* v = model.as_vasicek();
  if (v == nullptr) return heuristic_domain(model, timeline, x_min, x_max);

  const double tau = longest(timeline, horizon);
  const double m = bisect_width(
      [&](double w) {
        return kernel_deviation(*v, tau, x_min, x_max, x_min - w, x_max + w) <= tol.kernel;
      },
      "kernel mass");
  const double m_gauss = bisect_width(
      [&](double w) {
        return max_jump_mass(timeline, x_min - w, x_max + w, x_min, x_max) <= tol.jump;
      },
      "jump mass");

  DomainCertificate c;
  c.x_min = x_min;
  c.x_max = x_max;
  c.M = m;
  c.M_bar = std::max(m_gauss, two_point_width(timeline));
  const double pad = std::max({c.M, c.M_bar, kResolution});
  c.a_lo = x_min - pad;
  c.a_hi = x_max + pad;
  c.certified_interval = tau;
  c.eps_kernel = kernel_deviation(*v, tau, x_min, x_max, c.a_lo, c.a_hi);
  c.eps_jump = max_jump_mass(timeline, c.a_lo, c.a_hi, x_min, x_max);
  std::ostringstream note;
  note << "kernel certified on longest interval " << tau;
  c.note = note.str();
  return c;
}

DomainCertificate localize_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                  double x_max, double horizon, double tol) {
  return localize_domain(model, timeline, x_min, x_max, horizon, LocalizationTolerances{tol, tol});
}

DomainCertificate certify_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                 double x_max, double lo, double hi, double horizon) {
  check_region(x_min, x_max, horizon);
  if (!(lo < x_min && x_max < hi)) {
    throw ModelError("certify_domain: domain must strictly contain the region of interest");
  }
  DomainCertificate c;
  c.a_lo = lo;
  c.a_hi = hi;
  c.x_min = x_min;
  c.x_max = x_max;
  c.M = std::min(x_min - lo, hi - x_max);
  c.M_bar = c.M;
  c.manual = true;
  c.eps_jump = max_jump_mass(timeline, lo, hi, x_min, x_max);
  if (const ConstantVasicek* v = model.as_vasicek()) {
    const double tau = longest(timeline, horizon);
    c.certified_interval = tau;
    c.eps_kernel = kernel_deviation(*v, tau, x_min, x_max, lo, hi);
    c.note = "caller-supplied domain";
  } else {
    c.eps_kernel = std::nan("");
    c.heuristic = true;
    c.note = "caller-supplied domain; no kernel certificate for this model";
  }
  return c;
}

}  // namespace jumprate
