#pragma once

#include "jumprate/green.hpp"
#include "jumprate/price_result.hpp"

namespace jumprate {

/// G(t, s; x, xi) for the kernel's parameters; throws unless s > t.
double green_eval(const GreenKernel<double>& kernel, double t, double s, double x, double xi);

/// f(t_from, x_i) = integral of G(t_from, t_to; x_i, xi) g(xi) over the grid, by the
/// trapezoidal rule on grid values. Requires a uniform grid. Terms more than
/// 38.5 kernel widths from the integrand's centre underflow and are skipped.
GridFunction propagate_interval(const GreenKernel<double>& kernel, const GridFunction& terminal,
                                double t_from, double t_to);

/// Backward sweep over the relevant dates: jump condition at each r_k, then one
/// propagation to r_{k-1}. Snapshots are kept at every r_k and at 0.
PriceResult sweep_semianalytic(const GreenKernel<double>& kernel, const Timeline& timeline,
                               const Payoff& payoff, const DomainCertificate& domain, double dx);

}  // namespace jumprate
