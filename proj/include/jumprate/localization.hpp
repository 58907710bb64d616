#pragma once

#include "jumprate/model.hpp"

#include <string>

namespace jumprate {

/// Bounded computational domain [a_lo, a_hi] around a region of interest, with
/// the neglected kernel and jump-density mass it was certified for.
struct DomainCertificate {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double eps_kernel = 0.0;
  double eps_jump = 0.0;
  double M = 0.0;
  double M_bar = 0.0;
  double certified_interval = 0.0;  // horizon of the kernel check
  bool heuristic = false;
  bool manual = false;  // domain supplied by the caller, eps measured on it
  std::string note;
};

struct LocalizationTolerances {
  double kernel = 1e-8;
  double jump = 1e-10;
};

/// Trapezoidal value of the integral over [lo, hi] of G(t,s;x,xi) e^{(xi - x)/beta}.
double kernel_mass(const ConstantVasicek& model, double t, double s, double x, double lo,
                   double hi);

/// Exact value of the same integral over the real line: e^{(sigma^2/(2 beta^2) + alpha/beta)(s-t)}.
double kernel_mass_exact(const ConstantVasicek& model, double tau);

/// Largest |kernel_mass - exact| over 33 points of [x_min, x_max] for the domain [lo, hi].
double kernel_deviation(const ConstantVasicek& model, double tau, double x_min, double x_max,
                        double lo, double hi);

/// Smallest domain [x_min - W, x_max + W], W = max(M, M_bar), such that the
/// weighted kernel mass over the longest inter-date interval is within
/// tol.kernel of its exact value and each Gaussian jump density keeps at least
/// 1 - tol.jump of its mass inside. M and M_bar come from bisection with
/// resolution 1e-3; two-point laws use M_bar = 3 max|m|. Non-Vasicek models
/// fall back to a stationary-range heuristic flagged in the certificate.
DomainCertificate localize_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                  double x_max, double horizon, LocalizationTolerances tol = {});

DomainCertificate localize_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                  double x_max, double horizon, double tol);

/// Certificate for a caller-chosen domain: records the achieved eps values.
DomainCertificate certify_domain(const ModelSpec& model, const Timeline& timeline, double x_min,
                                 double x_max, double lo, double hi, double horizon);

}  // namespace jumprate
