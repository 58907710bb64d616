#include "jumprate/fd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace jumprate {

std::vector<std::string> validate(const FdConfig& cfg, const ModelSpec& model) {
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw ModelError("fd: theta must lie in [0, 1]");
  if (!(cfg.dx > 0.0)) throw ModelError("fd: dx must be positive");
  if (!(cfg.dt > 0.0)) throw ModelError("fd: dt must be positive");
  if (!(cfg.domain.a_lo < cfg.domain.a_hi)) throw ModelError("fd: empty domain");
  const Eigen::VectorXd xs = uniform_nodes(cfg.domain.a_lo, cfg.domain.a_hi, cfg.dx);
  if (xs.size() < 5) throw ModelError("fd: domain too small for dx (need N >= 4)");

  std::vector<std::string> warnings;
  if (cfg.theta == 1.0) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      worst = std::max(worst, model.variance(0.0, xs[i]) * cfg.dt / (cfg.dx * cfg.dx));
    }
    if (worst > 1.0) {
      std::ostringstream w;
      w << "explicit scheme may be unstable: sigma^2 dt / dx^2 = " << worst;
      warnings.push_back(w.str());
    }
  }
  return warnings;
}

TridiagonalSystem<double> assemble_step(const ModelSpec& model, double theta,
                                        const GridFunction& v_next, double t_next, double dt) {
  if (!(dt > 0.0)) throw ModelError("fd: dt must be positive");
  if (!v_next.uniform()) throw ModelError("fd: requires a uniform grid");
  const Eigen::Index n = v_next.size();
  if (n < 5) throw ModelError("fd: need at least five nodes");
  const Eigen::VectorXd& x = v_next.xs();
  const Eigen::VectorXd& v = v_next.vals();
  const double h = v_next.dx();
  const double h2 = h * h;
  const double t_now = t_next - dt;
  const double im = 1.0 - theta;
  const Eigen::Index last = n - 1;

  TridiagonalSystem<double> sys(n);
  for (Eigen::Index i = 1; i < last; ++i) {
    const double mu_n = model.drift(t_next, x[i]);
    const double s2_n = model.variance(t_next, x[i]);
    const double mu_c = model.drift(t_now, x[i]);
    const double s2_c = model.variance(t_now, x[i]);
    sys.sub[i] = -0.5 * s2_c * im / h2 + im * mu_c / (2.0 * h);
    sys.diag[i] = 1.0 / dt + s2_c * im / h2 + im * x[i];
    sys.sup[i] = -0.5 * s2_c * im / h2 - im * mu_c / (2.0 * h);
    sys.rhs[i] = v[i] / dt + 0.5 * s2_n * theta * (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2 +
                 theta * mu_n * (v[i + 1] - v[i - 1]) / (2.0 * h) - theta * x[i] * v[i];
  }

  {
    const double mu_n = model.drift(t_next, x[last]);
    const double mu_c = model.drift(t_now, x[last]);
    sys.sub[last] = im * mu_c / h;
    sys.diag[last] = 1.0 / dt - im * mu_c / h + im * x[last];
    sys.rhs[last] = v[last] / dt + theta * mu_n * (v[last] - v[last - 1]) / h -
                    theta * x[last] * v[last];
  }

  {
    const double mu_n = model.drift(t_next, x[0]);
    const double s2_n = model.variance(t_next, x[0]);
    const double mu_c = model.drift(t_now, x[0]);
    const double s2_c = model.variance(t_now, x[0]);
    sys.diag[0] = 1.0 / dt - 0.5 * s2_c * im / h2 + im * mu_c / h + im * x[0];
    sys.sup[0] = s2_c * im / h2 - im * mu_c / h;
    const double e0 = -0.5 * s2_c * im / h2;
    sys.rhs[0] = v[0] / dt + 0.5 * s2_n * theta * (v[0] - 2.0 * v[1] + v[2]) / h2 +
                 theta * mu_n * (v[1] - v[0]) / h - theta * x[0] * v[0];
    if (e0 != 0.0) {
      if (std::abs(sys.sup[1]) < 1e-300) {
        throw SingularSystemError("fd: cannot eliminate V2 from the first row");
      }
      const double f = e0 / sys.sup[1];
      sys.diag[0] -= f * sys.sub[1];
      sys.sup[0] -= f * sys.diag[1];
      sys.rhs[0] -= f * sys.rhs[1];
    }
  }
  return sys;
}

GridFunction theta_step(const ModelSpec& model, double theta, const GridFunction& v_next,
                        double t_next, double dt) {
  return v_next.with_values(solve_tridiagonal(assemble_step(model, theta, v_next, t_next, dt)));
}

PriceResult sweep_fd(const ModelSpec& model, const Timeline& timeline, const Payoff& payoff,
                     const FdConfig& cfg, bool keep_snapshots) {
  const auto start = std::chrono::steady_clock::now();
  PriceResult r;
  r.method = "fd";
  r.warnings = validate(cfg, model);
  r.domain = cfg.domain;
  r.dx = cfg.dx;
  r.dt = cfg.dt;
  r.theta = cfg.theta;

  Eigen::VectorXd xs = uniform_nodes(cfg.domain.a_lo, cfg.domain.a_hi, cfg.dx);
  Eigen::VectorXd vals = xs.unaryExpr([&](double x) { return payoff(x); });
  GridFunction f(xs, std::move(vals));

  auto march = [&](double from, double to) {
    const double len = from - to;
    if (len <= 1e-12) return;
    const long steps = std::max(1L, std::lround(len / cfg.dt));
    const double dt = len / static_cast<double>(steps);
    for (long j = steps; j-- > 0;) {
      const double t_next = to + dt * static_cast<double>(j + 1);
      f = theta_step(model, cfg.theta, f, t_next, dt);
      ++r.time_steps;
      if (keep_snapshots) r.snapshots.push_back({to + dt * static_cast<double>(j), f.vals()});
    }
  };

  const auto& dates = timeline.relevant();
  double t = timeline.maturity();
  for (auto it = dates.rbegin(); it != dates.rend(); ++it) {
    march(t, it->time);
    t = std::min(t, it->time);
    f = apply_jump_condition(f, *it);
  }
  march(t, 0.0);
  if (keep_snapshots && (r.snapshots.empty() || std::abs(r.snapshots.back().time) > 1e-12)) {
    r.snapshots.push_back({0.0, f.vals()});
  }
  r.xs = f.xs();
  r.values = f.vals();
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace jumprate
