#pragma once

#include "jumprate/model.hpp"

#include <cmath>
#include <numbers>

namespace jumprate {

/// Fundamental solution of  f_t + (alpha + beta x) f_x + sigma^2 f_xx / 2 - x f = 0
/// for constant-coefficient Vasicek dynamics.
///
///   G(t, s; x, xi) = C1 C2 / (sqrt(2 pi) Sigma) exp(-(xi - mu)^2 / (2 Sigma^2)),
///
/// a function of tau = s - t only. log(C1 C2) is affine in xi and is combined
/// before exponentiation.
template <typename Scalar>
class GreenKernel {
 public:
  /// Per-horizon constants: log G = log_norm + slope * xi - (xi - mean(x))^2 / (2 var).
  struct Horizon {
    Scalar tau;
    Scalar var;        // Sigma^2
    Scalar mean_gain;  // e^{beta tau}
    Scalar mean_shift; // mu(x) - x e^{beta tau}
    Scalar slope;      // d log(C1 C2) / d xi
    Scalar log_norm;   // log(C1 C2) at xi = 0 minus log(sqrt(2 pi) Sigma)

    [[nodiscard]] Scalar mean(Scalar x) const { return x * mean_gain + mean_shift; }
  };

  explicit GreenKernel(const ConstantVasicek& m)
      : alpha_(m.alpha), beta_(m.beta), sigma_(m.sigma) {
    if (!(m.sigma > 0.0)) throw ModelError("green kernel: sigma must be positive");
    if (m.beta == 0.0) throw ModelError("green kernel: beta must be non-zero");
  }

  [[nodiscard]] Horizon horizon(Scalar tau) const {
    using std::exp;
    using std::expm1;
    using std::log;
    if (!(tau > Scalar(0))) throw ModelError("green kernel: requires s > t");
    const Scalar b = beta_;
    const Scalar s2 = sigma_ * sigma_;
    const Scalar u = expm1(-b * tau);  // e^{-beta tau} - 1
    Horizon h{};
    h.tau = tau;
    h.var = -s2 / (Scalar(2) * b) * (-expm1(Scalar(2) * b * tau));
    h.mean_gain = exp(b * tau);
    h.mean_shift = alpha_ / b * expm1(b * tau) +
                   s2 / (Scalar(2) * b * b) * (exp(-b * tau) + exp(b * tau) - Scalar(2));
    h.slope = u / b;
    const Scalar drift_rate = s2 / (Scalar(2) * b * b) + alpha_ / b;
    h.log_norm = -s2 / (Scalar(4) * b * b * b) * u * (u - Scalar(2)) + alpha_ * u / (b * b) +
                 drift_rate * tau -
                 Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar> * h.var);
    return h;
  }

  [[nodiscard]] static Scalar log_eval(const Horizon& h, Scalar x, Scalar xi) {
    const Scalar d = xi - h.mean(x);
    return h.log_norm + h.slope * xi - d * d / (Scalar(2) * h.var);
  }

  [[nodiscard]] Scalar eval(Scalar t, Scalar s, Scalar x, Scalar xi) const {
    using std::exp;
    return exp(log_eval(horizon(s - t), x, xi));
  }

  /// Closed-form value of the integral of G(t,s;x,xi) e^{(xi - x)/beta} over xi.
  [[nodiscard]] Scalar weighted_mass(Scalar tau) const {
    using std::exp;
    return exp((sigma_ * sigma_ / (Scalar(2) * beta_ * beta_) + alpha_ / beta_) * tau);
  }

  [[nodiscard]] Scalar alpha() const noexcept { return alpha_; }
  [[nodiscard]] Scalar beta() const noexcept { return beta_; }
  [[nodiscard]] Scalar sigma() const noexcept { return sigma_; }

 private:
  Scalar alpha_;
  Scalar beta_;
  Scalar sigma_;
};

}  // namespace jumprate
