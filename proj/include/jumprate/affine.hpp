#pragma once

#include "jumprate/model.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace jumprate {

/// Vasicek B(t,T) = (e^{beta tau} - 1) / beta with tau = T - t.
double vasicek_B(double beta, double tau);
/// Vasicek A(t,T) for the jump-free model, tau = T - t.
double vasicek_A(const ConstantVasicek& m, double tau);

/// Piecewise-smooth function of time on [0, T], right-continuous at its breakpoints.
class PiecewiseCurve {
 public:
  struct Piece {
    double start = 0.0;
    double end = 0.0;
    std::function<double(double)> eval;
  };

  PiecewiseCurve() = default;
  explicit PiecewiseCurve(std::vector<Piece> pieces);

  double operator()(double t) const;
  /// Limit from the left; equals operator() away from breakpoints.
  [[nodiscard]] double left_limit(double t) const;
  [[nodiscard]] const std::vector<Piece>& pieces() const noexcept { return pieces_; }

 private:
  std::vector<Piece> pieces_;
};

/// Slope coefficient b(t,T) of the exponential-affine bond price.
///
/// Solves b' + beta b - delta b^2 / 2 + 1 = 0 backward on every inter-date
/// interval with b(T) = 0 and b(t_n-) = b(t_n) + 1 at roll-over dates. Constant
/// Vasicek models use the closed form; other affine models are integrated by
/// RK4 with step at most 1e-4 of the interval length. Throws when |b| > 1e8.
PiecewiseCurve riccati_b(const ModelSpec& model, const Timeline& timeline);

/// Intercept coefficient a(t,T): the integral of alpha b - gamma b^2 / 2 from t
/// to T (composite Simpson per smooth piece) minus log E[e^{-xi_j b(s_j)}] for
/// every rate jump s_j > t.
std::function<double(double)> integrate_a(const ModelSpec& model, const Timeline& timeline,
                                          const PiecewiseCurve& b);

class ZcbCoefficients {
 public:
  ZcbCoefficients(PiecewiseCurve b, std::function<double(double)> a, double maturity,
                  std::vector<double> breakpoints)
      : b_(std::move(b)), a_(std::move(a)), maturity_(maturity),
        breakpoints_(std::move(breakpoints)) {}

  [[nodiscard]] double b(double t) const { return b_(t); }
  [[nodiscard]] double a(double t) const { return a_(t); }
  [[nodiscard]] const PiecewiseCurve& b_curve() const noexcept { return b_; }
  [[nodiscard]] double maturity() const noexcept { return maturity_; }
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

 private:
  PiecewiseCurve b_;
  std::function<double(double)> a_;
  double maturity_;
  std::vector<double> breakpoints_;
};

/// Bond coefficients for the timeline's maturity. Requires an affine model, no
/// common jump/roll-over dates and every relevant date strictly before maturity.
ZcbCoefficients zcb_coefficients(const ModelSpec& model, const Timeline& timeline);

/// exp(-a(t,T) - x b(t,T)); throws for t outside [0, T].
double zcb_price(const ZcbCoefficients& coeffs, double t, double x);
/// Bond prices at one time on a set of rates; a and b are evaluated once.
Eigen::VectorXd zcb_prices(const ZcbCoefficients& coeffs, double t, const Eigen::VectorXd& xs);

struct CallSpec {
  double strike = 0.0;
  double option_expiry = 0.0;  // T
  double bond_maturity = 0.0;  // S > T
};

void validate(const CallSpec& spec);

/// Integrated volatility of log(P_S / P_T) between t and the option expiry.
/// `to_bond` is the timeline up to the bond maturity S; every rate jump in
/// (t, T] must be Gaussian.
double call_sigma_c(const ConstantVasicek& model, const Timeline& to_bond, const CallSpec& spec,
                    double t);

/// European call on a zero-coupon bond in the Vasicek model with Gaussian rate
/// jumps. Coefficients for P_T and P_S are built once.
class VasicekCallPricer {
 public:
  VasicekCallPricer(const ModelSpec& model, const std::vector<RateJump>& rate_jumps,
                    const std::vector<double>& rollovers, const CallSpec& spec);

  [[nodiscard]] double price(double t, double x) const;
  [[nodiscard]] Eigen::VectorXd prices(double t, const Eigen::VectorXd& xs) const;
  [[nodiscard]] double sigma_c(double t) const;
  /// True when sigma_c(t) = 0 for t < T and the price collapses to intrinsic value.
  [[nodiscard]] bool deterministic_at(double t) const;
  [[nodiscard]] double bond_price(double t, double x) const;   // P_S
  [[nodiscard]] double expiry_bond(double t, double x) const;  // P_T
  [[nodiscard]] const CallSpec& spec() const noexcept { return spec_; }

 private:
  ConstantVasicek params_;
  CallSpec spec_;
  Timeline to_expiry_;
  Timeline to_bond_;
  std::shared_ptr<const ZcbCoefficients> p_expiry_;
  std::shared_ptr<const ZcbCoefficients> p_bond_;
  double b_expiry_bond_ = 0.0;  // b(T, S)
};

double call_price(const ModelSpec& model, const std::vector<RateJump>& rate_jumps,
                  const std::vector<double>& rollovers, const CallSpec& spec, double t, double x);

/// Standard normal cdf via the complementary error function.
double normal_cdf(double z);

}  // namespace jumprate
