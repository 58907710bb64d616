#include "jumprate/affine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jumprate {

namespace {

constexpr double kBlowUp = 1e8;
constexpr double kTimeTol = 1e-12;

bool is_rollover_date(const Timeline& tl, double t) {
  return std::any_of(tl.relevant().begin(), tl.relevant().end(), [t](const RelevantDate& r) {
    return r.kind != DateKind::RateJumpOnly && std::abs(r.time - t) <= kTimeTol;
  });
}

// Dense RK4 solution of the Riccati equation on one interval, stored on the
// step nodes and evaluated with cubic Hermite interpolation.
class RiccatiPiece {
 public:
  RiccatiPiece(const ModelSpec& model, double start, double end, double terminal)
      : model_(model), start_(start), end_(end) {
    const double len = end - start;
    constexpr int steps = 10000;
    h_ = len / steps;
    vals_.resize(steps + 1);
    vals_[steps] = terminal;
    double b = terminal;
    for (int i = steps; i > 0; --i) {
      const double t = start + i * h_;
      // integrate backward: db/dt = rhs(t, b), step -h
      const double k1 = rhs(t, b);
      const double k2 = rhs(t - 0.5 * h_, b - 0.5 * h_ * k1);
      const double k3 = rhs(t - 0.5 * h_, b - 0.5 * h_ * k2);
      const double k4 = rhs(t - h_, b - h_ * k3);
      b -= h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(b) || std::abs(b) > kBlowUp) {
        std::ostringstream os;
        os << "riccati_b: blow-up on interval [" << start << ", " << end << ")";
        throw ModelError(os.str());
      }
      vals_[i - 1] = b;
    }
  }

  double operator()(double t) const {
    const double u = std::clamp((t - start_) / h_, 0.0, static_cast<double>(vals_.size() - 1));
    auto i = static_cast<std::size_t>(u);
    if (i + 1 >= vals_.size()) i = vals_.size() - 2;
    const double s = u - static_cast<double>(i);
    const double t0 = start_ + static_cast<double>(i) * h_;
    const double y0 = vals_[i];
    const double y1 = vals_[i + 1];
    const double d0 = rhs(t0, y0) * h_;
    const double d1 = rhs(t0 + h_, y1) * h_;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * d1;
  }

 private:
  double rhs(double t, double b) const {
    return -model_.beta(t) * b + 0.5 * model_.delta(t) * b * b - 1.0;
  }

  ModelSpec model_;
  double start_;
  double end_;
  double h_ = 0.0;
  std::vector<double> vals_;
};

double simpson(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  int n = static_cast<int>(std::ceil((hi - lo) / 1e-3));
  n = std::max(16, n + (n % 2));
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return acc * h / 3.0;
}

void require_separate_dates(const Timeline& tl, const char* who) {
  if (tl.has_common_dates()) {
    throw ModelError(std::string(who) +
                     ": common rate-jump and roll-over dates are not supported in closed form");
  }
}

}  // namespace

double vasicek_B(double beta, double tau) { return std::expm1(beta * tau) / beta; }

double vasicek_A(const ConstantVasicek& m, double tau) {
  const double B = vasicek_B(m.beta, tau);
  const double s2 = m.sigma * m.sigma;
  return (m.alpha / m.beta) * (B - tau) -
         s2 / (2.0 * m.beta * m.beta) * (0.5 * m.beta * B * B - B + tau);
}

// ---------------------------------------------------------------------------

PiecewiseCurve::PiecewiseCurve(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ModelError("piecewise curve: no pieces");
}

double PiecewiseCurve::operator()(double t) const {
  const double lo = pieces_.front().start;
  const double hi = pieces_.back().end;
  if (t < lo - kTimeTol || t > hi + kTimeTol) {
    std::ostringstream os;
    os << "piecewise curve: t = " << t << " outside [" << lo << ", " << hi << "]";
    throw ModelError(os.str());
  }
  for (const auto& p : pieces_) {
    if (t < p.end - kTimeTol) return p.eval(std::max(t, p.start));
  }
  return pieces_.back().eval(std::min(t, hi));
}

double PiecewiseCurve::left_limit(double t) const {
  for (const auto& p : pieces_) {
    if (t <= p.end + kTimeTol && t > p.start + kTimeTol) return p.eval(std::min(t, p.end));
  }
  return (*this)(t);
}

PiecewiseCurve riccati_b(const ModelSpec& model, const Timeline& timeline) {
  if (!model.is_affine()) throw ModelError("riccati_b: model must be affine");
  require_separate_dates(timeline, "riccati_b");
  const auto bp = timeline.breakpoints();
  const std::size_t n_pieces = bp.size() - 1;
  std::vector<PiecewiseCurve::Piece> pieces(n_pieces);

  double right_value = 0.0;  // b at the right end of the current piece (right limit)
  for (std::size_t k = n_pieces; k-- > 0;) {
    const double start = bp[k];
    const double end = bp[k + 1];
    double terminal = right_value;
    if (k + 1 < bp.size() && is_rollover_date(timeline, end)) terminal += 1.0;

    if (const auto* v = model.as_vasicek()) {
      const double beta = v->beta;
      pieces[k] = {start, end, [beta, end, terminal](double t) {
                     return vasicek_B(beta, end - t) + std::exp(beta * (end - t)) * terminal;
                   }};
    } else {
      auto piece = std::make_shared<RiccatiPiece>(model, start, end, terminal);
      pieces[k] = {start, end, [piece](double t) { return (*piece)(t); }};
    }
    right_value = pieces[k].eval(start);
  }
  return PiecewiseCurve(std::move(pieces));
}

std::function<double(double)> integrate_a(const ModelSpec& model, const Timeline& timeline,
                                          const PiecewiseCurve& b) {
  if (!model.is_affine()) throw ModelError("integrate_a: model must be affine");
  require_separate_dates(timeline, "integrate_a");
  const auto bp = timeline.breakpoints();
  const double maturity = timeline.maturity();

  // Integral over [bp[k+1], T] for each piece k; b is smooth inside each piece,
  // so the left-limit form is used at the right end of the Simpson panel.
  const std::size_t n_pieces = bp.size() - 1;
  std::vector<std::function<double(double)>> piece_integrand(n_pieces);
  std::vector<double> tail(n_pieces, 0.0);
  for (std::size_t k = 0; k < n_pieces; ++k) {
    const auto& piece = b.pieces()[k];
    piece_integrand[k] = [model, eval = piece.eval](double u) {
      const double bu = eval(u);
      return model.alpha(u) * bu - 0.5 * model.gamma(u) * bu * bu;
    };
  }
  for (std::size_t k = n_pieces; k-- > 1;) {
    tail[k - 1] = tail[k] + simpson(piece_integrand[k], bp[k], bp[k + 1]);
  }

  std::vector<std::pair<double, double>> jump_terms;
  for (const auto& j : timeline.rate_jumps()) {
    jump_terms.emplace_back(j.time, log_mgf_neg(j.law, b(j.time)));
  }

  return [bp, tail, piece_integrand, jump_terms, maturity](double t) {
    if (t < -kTimeTol || t > maturity + kTimeTol) {
      throw ModelError("integrate_a: t outside [0, T]");
    }
    std::size_t k = 0;
    while (k + 1 < bp.size() - 1 && t >= bp[k + 1] - kTimeTol) ++k;
    double a = simpson(piece_integrand[k], std::max(t, bp[k]), bp[k + 1]) + tail[k];
    for (const auto& [s, term] : jump_terms) {
      if (s > t + kTimeTol) a -= term;
    }
    return a;
  };
}

ZcbCoefficients zcb_coefficients(const ModelSpec& model, const Timeline& timeline) {
  for (const auto& r : timeline.relevant()) {
    if (std::abs(r.time - timeline.maturity()) <= kTimeTol) {
      throw ModelError("zcb_coefficients: closed form requires all relevant dates before maturity");
    }
  }
  auto b = riccati_b(model, timeline);
  auto a = integrate_a(model, timeline, b);
  return ZcbCoefficients(std::move(b), std::move(a), timeline.maturity(), timeline.breakpoints());
}

double zcb_price(const ZcbCoefficients& coeffs, double t, double x) {
  if (t < -kTimeTol || t > coeffs.maturity() + kTimeTol) {
    throw ModelError("zcb_price: t must lie in [0, T]");
  }
  return std::exp(-coeffs.a(t) - x * coeffs.b(t));
}

Eigen::VectorXd zcb_prices(const ZcbCoefficients& coeffs, double t, const Eigen::VectorXd& xs) {
  if (t < -kTimeTol || t > coeffs.maturity() + kTimeTol) {
    throw ModelError("zcb_price: t must lie in [0, T]");
  }
  const double a = coeffs.a(t);
  const double b = coeffs.b(t);
  return (-a - b * xs.array()).exp().matrix();
}

// ---------------------------------------------------------------------------

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void validate(const CallSpec& spec) {
  if (!(spec.strike > 0.0)) throw ModelError("call: strike must be positive");
  if (!(spec.option_expiry > 0.0) || !(spec.bond_maturity > spec.option_expiry)) {
    throw ModelError("call: need 0 < option expiry < bond maturity");
  }
}

namespace {

// Standard deviation of rho_T given rho_t: diffusion plus Gaussian jumps in (t, T].
double short_rate_stdev(const ConstantVasicek& model, const std::vector<RateJump>& jumps,
                        double T, double t) {
  if (t > T + kTimeTol) throw ModelError("call_sigma_c: t must not exceed the option expiry");
  double var = model.sigma * model.sigma / (2.0 * model.beta) *
               std::expm1(2.0 * model.beta * (T - t));
  for (const auto& j : jumps) {
    if (j.time > T + kTimeTol || !(j.time > t + kTimeTol)) continue;
    const auto* g = std::get_if<GaussianJump>(&j.law);
    if (!g) throw ModelError("call_sigma_c: closed form requires Gaussian rate jumps");
    var += g->stdev * g->stdev * std::exp(2.0 * model.beta * (T - j.time));
  }
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace

double call_sigma_c(const ConstantVasicek& model, const Timeline& to_bond, const CallSpec& spec,
                    double t) {
  validate(spec);
  const ModelSpec m = ModelSpec::vasicek(model.alpha, model.beta, model.sigma);
  const double b_TS = riccati_b(m, to_bond)(spec.option_expiry);
  return b_TS * short_rate_stdev(model, to_bond.rate_jumps(), spec.option_expiry, t);
}

VasicekCallPricer::VasicekCallPricer(const ModelSpec& model,
                                     const std::vector<RateJump>& rate_jumps,
                                     const std::vector<double>& rollovers, const CallSpec& spec)
    : params_(model.require_vasicek("call_price")), spec_(spec) {
  validate(spec_);
  to_expiry_ = merge_relevant_dates(rate_jumps, rollovers, spec_.option_expiry);
  to_bond_ = merge_relevant_dates(rate_jumps, rollovers, spec_.bond_maturity);
  for (const auto& j : to_expiry_.rate_jumps()) {
    if (!std::holds_alternative<GaussianJump>(j.law)) {
      throw ModelError("call_price: closed form requires Gaussian rate jumps before expiry");
    }
  }
  p_expiry_ = std::make_shared<ZcbCoefficients>(zcb_coefficients(model, to_expiry_));
  p_bond_ = std::make_shared<ZcbCoefficients>(zcb_coefficients(model, to_bond_));
  b_expiry_bond_ = p_bond_->b(spec_.option_expiry);
}

double VasicekCallPricer::sigma_c(double t) const {
  return b_expiry_bond_ *
         short_rate_stdev(params_, to_bond_.rate_jumps(), spec_.option_expiry, t);
}

bool VasicekCallPricer::deterministic_at(double t) const {
  return t < spec_.option_expiry - kTimeTol && sigma_c(t) == 0.0;
}

double VasicekCallPricer::bond_price(double t, double x) const { return zcb_price(*p_bond_, t, x); }

double VasicekCallPricer::expiry_bond(double t, double x) const {
  return zcb_price(*p_expiry_, t, x);
}

double VasicekCallPricer::price(double t, double x) const {
  Eigen::VectorXd xs(1);
  xs[0] = x;
  return prices(t, xs)[0];
}

Eigen::VectorXd VasicekCallPricer::prices(double t, const Eigen::VectorXd& xs) const {
  const double T = spec_.option_expiry;
  const double K = spec_.strike;
  const Eigen::VectorXd ps = zcb_prices(*p_bond_, t, xs);
  Eigen::VectorXd out(xs.size());
  if (t >= T - kTimeTol) {
    out = (ps.array() - K).max(0.0);
    return out;
  }
  const Eigen::VectorXd pt = zcb_prices(*p_expiry_, t, xs);
  const double sc = sigma_c(t);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (sc == 0.0) {
      out[i] = std::max(ps[i] - K * pt[i], 0.0);
      continue;
    }
    const double d1 = std::log(ps[i] / (pt[i] * K)) / sc + 0.5 * sc;
    const double d2 = d1 - sc;
    out[i] = ps[i] * normal_cdf(d1) - K * pt[i] * normal_cdf(d2);
  }
  return out;
}

double call_price(const ModelSpec& model, const std::vector<RateJump>& rate_jumps,
                  const std::vector<double>& rollovers, const CallSpec& spec, double t, double x) {
  return VasicekCallPricer(model, rate_jumps, rollovers, spec).price(t, x);
}

}  // namespace jumprate
