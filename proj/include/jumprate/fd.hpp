#pragma once

#include "jumprate/price_result.hpp"
#include "jumprate/tridiagonal.hpp"

#include <string>
#include <vector>

namespace jumprate {

/// theta weights the known (later) time level: 1 explicit Euler, 0 implicit
/// Euler, 1/2 Crank-Nicolson.
struct FdConfig {
  double theta = 0.5;
  double dx = 5e-3;
  double dt = 4e-3;
  DomainCertificate domain;
};

/// Throws on invalid settings; returns warnings (explicit-step stability).
std::vector<std::string> validate(const FdConfig& cfg, const ModelSpec& model);

/// One backward step from t_next to t_next - dt as a tridiagonal system in V^j.
///
/// Interior rows discretize the pricing equation with centred differences.
/// The last row drops the second derivative and uses a backward first
/// difference; the first row collocates the full equation with the stencil
/// V0 - 2 V1 + V2 and a forward first difference, and its V2 coupling is
/// eliminated with row 1. theta-weighted coefficients are taken at t_next,
/// the others at t_next - dt.
TridiagonalSystem<double> assemble_step(const ModelSpec& model, double theta,
                                        const GridFunction& v_next, double t_next, double dt);

/// assemble_step followed by the tridiagonal solve.
GridFunction theta_step(const ModelSpec& model, double theta, const GridFunction& v_next,
                        double t_next, double dt);

/// Backward sweep: payoff at T, then for every inter-date interval
/// M_k = max(1, round(length / dt)) theta steps, with the jump condition applied
/// at each relevant date. Snapshots are kept after every step when requested.
PriceResult sweep_fd(const ModelSpec& model, const Timeline& timeline, const Payoff& payoff,
                     const FdConfig& cfg, bool keep_snapshots = true);

}  // namespace jumprate
