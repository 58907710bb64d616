#include "jumprate/semianalytic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace jumprate {

namespace {

constexpr double kWindow = 38.5;  // exp(-38.5^2 / 2) < 1e-321

}  // namespace

double green_eval(const GreenKernel<double>& kernel, double t, double s, double x, double xi) {
  return kernel.eval(t, s, x, xi);
}

GridFunction propagate_interval(const GreenKernel<double>& kernel, const GridFunction& terminal,
                                double t_from, double t_to) {
  if (!(t_from < t_to)) throw ModelError("propagate_interval: requires t_from < t_to");
  if (!terminal.uniform() || terminal.size() < 2) {
    throw ModelError("propagate_interval: requires a uniform grid with at least two nodes");
  }
  const auto h = kernel.horizon(t_to - t_from);
  const Eigen::VectorXd& xs = terminal.xs();
  const Eigen::VectorXd& g = terminal.vals();
  const Eigen::Index n = xs.size();
  const double dx = terminal.dx();
  const double x0 = xs[0];
  const double sd = std::sqrt(h.var);

  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double centre = h.mean(xs[i]) + h.slope * h.var;
    const auto first = static_cast<Eigen::Index>(std::floor((centre - kWindow * sd - x0) / dx));
    const auto last = static_cast<Eigen::Index>(std::ceil((centre + kWindow * sd - x0) / dx));
    const Eigen::Index lo = std::max<Eigen::Index>(first, 0);
    const Eigen::Index hi = std::min<Eigen::Index>(last, n - 1);
    double sum = 0.0;
    for (Eigen::Index j = lo; j <= hi; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      sum += w * g[j] * std::exp(GreenKernel<double>::log_eval(h, xs[i], xs[j]));
    }
    out[i] = sum * dx;
  }
  return terminal.with_values(std::move(out));
}

PriceResult sweep_semianalytic(const GreenKernel<double>& kernel, const Timeline& timeline,
                               const Payoff& payoff, const DomainCertificate& domain, double dx) {
  if (!(dx > 0.0)) throw ModelError("sweep_semianalytic: dx must be positive");
  const auto start = std::chrono::steady_clock::now();

  Eigen::VectorXd xs = uniform_nodes(domain.a_lo, domain.a_hi, dx);
  if (xs.size() < 4) throw ModelError("sweep_semianalytic: domain too small for dx");
  Eigen::VectorXd vals = xs.unaryExpr([&](double x) { return payoff(x); });
  GridFunction f(xs, std::move(vals));

  PriceResult r;
  r.method = "semianalytic";
  r.domain = domain;
  r.dx = dx;

  const auto& dates = timeline.relevant();
  double t = timeline.maturity();
  for (auto it = dates.rbegin(); it != dates.rend(); ++it) {
    if (it->time < t - 1e-12) {
      f = propagate_interval(kernel, f, it->time, t);
      ++r.time_steps;
      t = it->time;
    }
    r.snapshots.push_back({t, f.vals()});
    f = apply_jump_condition(f, *it);
  }
  if (t > 1e-12) {
    f = propagate_interval(kernel, f, 0.0, t);
    ++r.time_steps;
  }
  r.snapshots.push_back({0.0, f.vals()});
  r.xs = f.xs();
  r.values = f.vals();
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace jumprate
