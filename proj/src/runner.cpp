#include "jumprate/runner.hpp"

#include "jumprate/semianalytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

namespace jumprate {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool wants(const ScenarioConfig& cfg, Engine e) {
  return std::find(cfg.engines.begin(), cfg.engines.end(), e) != cfg.engines.end();
}

struct Product {
  Timeline sweep;
  Payoff payoff;
  std::optional<ReferenceSurface> closed_form;
  std::string closed_form_issue;
};

Product build_product(const ScenarioConfig& cfg, const ModelSpec& model) {
  Product p;
  const double horizon = cfg.product.horizon();
  p.sweep = build_timeline(cfg, horizon);
  if (cfg.product.kind == ProductKind::Zcb) {
    p.payoff = [](double) { return 1.0; };
    try {
      auto co = std::make_shared<const ZcbCoefficients>(zcb_coefficients(model, p.sweep));
      p.closed_form = [co](double t, const Eigen::VectorXd& xs) { return zcb_prices(*co, t, xs); };
    } catch (const ModelError& e) {
      p.closed_form_issue = e.what();
    }
    return p;
  }

  const CallSpec spec = cfg.product.call;
  std::shared_ptr<const ZcbCoefficients> bond;
  try {
    bond = std::make_shared<const ZcbCoefficients>(
        zcb_coefficients(model, build_timeline(cfg, spec.bond_maturity)));
  } catch (const ModelError& e) {
    throw ModelError(std::string("call payoff: ") + e.what());
  }
  const double expiry = spec.option_expiry;
  const double strike = spec.strike;
  p.payoff = [bond, expiry, strike](double x) {
    return std::max(zcb_price(*bond, expiry, x) - strike, 0.0);
  };
  try {
    auto pricer = std::make_shared<const VasicekCallPricer>(model, cfg.rate_jumps, cfg.rollovers,
                                                            spec);
    p.closed_form = [pricer](double t, const Eigen::VectorXd& xs) { return pricer->prices(t, xs); };
  } catch (const ModelError& e) {
    p.closed_form_issue = e.what();
  }
  return p;
}

template <typename F>
auto tagged(Engine e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ModelError& err) {
    throw ModelError(engine_name(e) + ": " + err.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& err) {
    throw EngineError(engine_name(e) + ": " + err.what());
  }
}

PriceResult closed_form_result(const Product& p, const DomainCertificate& d, double dx) {
  PriceResult r;
  r.method = engine_name(Engine::ClosedForm);
  r.domain = d;
  r.dx = dx;
  r.xs = uniform_nodes(d.a_lo, d.a_hi, dx);
  r.values = (*p.closed_form)(0.0, r.xs);
  return r;
}

struct GridRun {
  std::vector<PriceResult> results;
  std::vector<PairError> errors;
};

GridRun run_grid_engines(const ScenarioConfig& cfg, const ModelSpec& model, const Product& p,
                         const DomainCertificate& d, double dx, bool keep_closed_form) {
  GridRun g;
  const double lo = cfg.numerics.x_min;
  const double hi = cfg.numerics.x_max;
  const bool closed = wants(cfg, Engine::ClosedForm);
  if (closed && !p.closed_form) {
    throw EngineError("closed_form: not available for this scenario (" + p.closed_form_issue + ")");
  }
  if (closed && keep_closed_form) g.results.push_back(closed_form_result(p, d, dx));

  std::optional<PriceResult> sa;
  if (wants(cfg, Engine::Semianalytic)) {
    sa = tagged(Engine::Semianalytic, [&] {
      const GreenKernel<double> kernel(model.require_vasicek("semianalytic engine"));
      return sweep_semianalytic(kernel, p.sweep, p.payoff, d, dx);
    });
    if (closed) {
      g.errors.push_back({sa->method, "closed_form", max_mean_error(*sa, *p.closed_form, lo, hi)});
    }
  }
  if (wants(cfg, Engine::Fd)) {
    const FdConfig fc{cfg.numerics.theta, dx, cfg.numerics.dt, d};
    PriceResult fd = tagged(Engine::Fd, [&] { return sweep_fd(model, p.sweep, p.payoff, fc); });
    if (closed) {
      g.errors.push_back({fd.method, "closed_form", max_mean_error(fd, *p.closed_form, lo, hi)});
    }
    if (sa) g.errors.push_back({fd.method, sa->method, max_mean_error(fd, *sa, lo, hi)});
    fd.snapshots.clear();
    g.results.push_back(std::move(fd));
  }
  if (sa) {
    sa->snapshots.clear();
    g.results.push_back(std::move(*sa));
  }
  return g;
}

void write_certificate(const DomainCertificate& d, std::ostream& out) {
  out << "# domain: " << num(d.a_lo) << " " << num(d.a_hi) << "\n";
  out << "# region: " << num(d.x_min) << " " << num(d.x_max) << "\n";
  out << "# eps_kernel: " << num(d.eps_kernel) << "\n";
  out << "# eps_jump: " << num(d.eps_jump) << "\n";
  out << "# M: " << num(d.M) << "\n";
  out << "# M_bar: " << num(d.M_bar) << "\n";
  out << "# certified_interval: " << num(d.certified_interval) << "\n";
  out << "# heuristic: " << (d.heuristic ? "true" : "false") << "\n";
  out << "# manual_domain: " << (d.manual ? "true" : "false") << "\n";
  if (!d.note.empty()) out << "# note: " << d.note << "\n";
}

void write_header(const ScenarioConfig& cfg, std::ostream& out) {
  out << "# scenario: " << cfg.name << "\n";
  out << "# product: " << (cfg.product.kind == ProductKind::Zcb ? "zcb" : "call") << "\n";
  out << "# theta: " << num(cfg.numerics.theta) << "\n";
  out << "# dt: " << num(cfg.numerics.dt) << "\n";
}

}  // namespace

DomainCertificate scenario_domain(const ScenarioConfig& cfg) {
  const ModelSpec model = build_model(cfg.model);
  const double horizon = cfg.product.horizon();
  const Timeline tl = build_timeline(cfg, horizon);
  const NumericsConfig& n = cfg.numerics;
  if (n.domain) {
    return certify_domain(model, tl, n.x_min, n.x_max, n.domain->first, n.domain->second, horizon);
  }
  return localize_domain(model, tl, n.x_min, n.x_max, horizon,
                         LocalizationTolerances{n.tolerance, n.jump_tolerance});
}

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  ScenarioRun run;
  run.config = cfg;
  const ModelSpec model = build_model(cfg.model);
  const Product p = build_product(cfg, model);
  run.domain = scenario_domain(cfg);
  GridRun g = run_grid_engines(cfg, model, p, run.domain, cfg.numerics.dx, true);
  run.results = std::move(g.results);
  run.errors = std::move(g.errors);
  if (wants(cfg, Engine::Mc)) run.mc = run_mc(cfg, *cfg.mc);
  return run;
}

std::vector<McRow> run_mc(const ScenarioConfig& cfg, const McConfig& mc) {
  const ModelSpec model = build_model(cfg.model);
  const Product p = build_product(cfg, model);
  std::vector<McRow> rows;
  for (double x0 : mc.x0) {
    McRow row;
    row.x0 = x0;
    row.estimate = tagged(Engine::Mc, [&] {
      return mc_price(model, p.sweep, p.payoff, 0.0, x0, mc.paths);
    });
    row.reference = std::nan("");
    if (p.closed_form) {
      row.reference = (*p.closed_form)(0.0, Eigen::VectorXd::Constant(1, x0))[0];
      row.reference_engine = "closed_form";
    }
    rows.push_back(row);
  }
  return rows;
}

ConvergenceTable convergence_study(const ScenarioConfig& cfg, const std::vector<double>& ladder) {
  validate(cfg);
  if (ladder.size() < 3) throw ConfigError("convergence ladder needs at least three dx values");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw ConfigError("convergence ladder values must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) {
      throw ConfigError("convergence ladder must be strictly descending");
    }
  }
  ConvergenceTable table;
  table.config = cfg;
  const ModelSpec model = build_model(cfg.model);
  const Product p = build_product(cfg, model);
  table.domain = scenario_domain(cfg);
  for (double dx : ladder) {
    GridRun g = run_grid_engines(cfg, model, p, table.domain, dx, false);
    table.rows.push_back({dx, std::move(g.errors)});
  }
  if (!table.rows.empty()) {
    for (std::size_t k = 0; k < table.rows.front().errors.size(); ++k) {
      std::vector<double> h;
      std::vector<double> e;
      for (const ConvergenceRow& row : table.rows) {
        if (row.errors[k].error.abs > 0.0) {
          h.push_back(row.dx);
          e.push_back(row.errors[k].error.abs);
        }
      }
      const PairError& pe = table.rows.front().errors[k];
      table.slopes.emplace_back(pe.engine + "_vs_" + pe.reference,
                                h.size() >= 2 ? loglog_slope(h, e) : std::nan(""));
    }
  }
  return table;
}

void write_prices_csv(const ScenarioRun& run, std::ostream& out) {
  write_header(run.config, out);
  out << "# dx: " << num(run.config.numerics.dx) << "\n";
  write_certificate(run.domain, out);
  for (const PriceResult& r : run.results) {
    out << "# engine " << r.method << ": steps " << r.time_steps << ", wall_seconds "
        << num(r.wall_seconds) << "\n";
    for (const std::string& w : r.warnings) out << "# warning " << r.method << ": " << w << "\n";
  }
  for (const PairError& e : run.errors) {
    out << "# max_mean_abs_error " << e.engine << "_vs_" << e.reference << ": "
        << num(e.error.abs) << "\n";
  }
  if (run.results.empty()) {
    out << "x\n";
    return;
  }
  const Eigen::VectorXd& xs = run.results.front().xs;
  out << "x";
  for (const PriceResult& r : run.results) out << "," << r.method;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < run.results.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      pairs.emplace_back(a, b);
      out << ",abs_err_" << run.results[a].method << "_vs_" << run.results[b].method;
    }
  }
  out << "\n";
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    out << num(xs[i]);
    for (const PriceResult& r : run.results) out << "," << num(r.values[i]);
    for (auto [a, b] : pairs) {
      out << "," << num(std::abs(run.results[a].values[i] - run.results[b].values[i]));
    }
    out << "\n";
  }
}

void write_errors_csv(const ScenarioRun& run, std::ostream& out) {
  write_header(run.config, out);
  out << "# region: " << num(run.config.numerics.x_min) << " " << num(run.config.numerics.x_max)
      << "\n";
  out << "engine,reference,dx,max_mean_abs_error,max_mean_rel_error,worst_time,snapshots\n";
  for (const PairError& e : run.errors) {
    out << e.engine << "," << e.reference << "," << num(run.config.numerics.dx) << ","
        << num(e.error.abs) << "," << num(e.error.rel) << "," << num(e.error.worst_time) << ","
        << e.error.snapshots << "\n";
  }
}

void write_mc_csv(const ScenarioConfig& cfg, const std::vector<McRow>& rows, std::ostream& out) {
  write_header(cfg, out);
  if (cfg.mc) {
    out << "# paths: " << cfg.mc->paths.n_paths << "\n";
    out << "# steps_per_year: " << cfg.mc->paths.steps_per_year << "\n";
    out << "# seed: " << cfg.mc->paths.seed << "\n";
    out << "# antithetic: " << (cfg.mc->paths.antithetic ? "true" : "false") << "\n";
  }
  out << "x0,mean,std_error,n_paths,reference,z_score\n";
  for (const McRow& r : rows) {
    const double z = (r.estimate.mean - r.reference) / r.estimate.std_error;
    out << num(r.x0) << "," << num(r.estimate.mean) << "," << num(r.estimate.std_error) << ","
        << r.estimate.n_paths << "," << num(r.reference) << "," << num(z) << "\n";
  }
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  write_header(table.config, out);
  write_certificate(table.domain, out);
  for (const auto& [pair, slope] : table.slopes) {
    out << "# loglog_slope " << pair << ": " << num(slope) << "\n";
  }
  out << "dx";
  if (!table.rows.empty()) {
    for (const PairError& e : table.rows.front().errors) {
      const std::string tag = e.engine + "_vs_" + e.reference;
      out << ",abs_" << tag << ",rel_" << tag;
    }
  }
  out << "\n";
  for (const ConvergenceRow& row : table.rows) {
    out << num(row.dx);
    for (const PairError& e : row.errors) out << "," << num(e.error.abs) << "," << num(e.error.rel);
    out << "\n";
  }
}

void write_domain_csv(const ScenarioConfig& cfg, const DomainCertificate& d, std::ostream& out) {
  write_header(cfg, out);
  if (!d.note.empty()) out << "# note: " << d.note << "\n";
  out << "a_lo,a_hi,x_min,x_max,eps_kernel,eps_jump,M,M_bar,certified_interval,heuristic,manual\n";
  out << num(d.a_lo) << "," << num(d.a_hi) << "," << num(d.x_min) << "," << num(d.x_max) << ","
      << num(d.eps_kernel) << "," << num(d.eps_jump) << "," << num(d.M) << "," << num(d.M_bar)
      << "," << num(d.certified_interval) << "," << (d.heuristic ? 1 : 0) << ","
      << (d.manual ? 1 : 0) << "\n";
}

void write_paths_csv(const ScenarioConfig& cfg, int n_paths, std::uint64_t seed, double x0,
                     std::ostream& out) {
  if (n_paths < 1) throw ConfigError("trajectory count must be positive");
  const ModelSpec model = build_model(cfg.model);
  const double horizon = cfg.product.horizon();
  const Timeline tl = build_timeline(cfg, horizon);
  PathConfig pc = cfg.mc ? cfg.mc->paths : PathConfig{};
  pc.seed = seed;
  std::vector<PathSample> paths;
  for (int k = 0; k < n_paths; ++k) {
    PathRng rng(seed, static_cast<std::uint64_t>(k));
    paths.push_back(tagged(Engine::Mc, [&] {
      return simulate_path(model, tl, x0, 0.0, horizon, pc, rng, true);
    }));
  }
  write_header(cfg, out);
  out << "# seed: " << seed << "\n";
  out << "# x0: " << num(x0) << "\n";
  out << "# steps_per_year: " << pc.steps_per_year << "\n";
  out << "t";
  for (int k = 0; k < n_paths; ++k) out << ",path_" << k;
  out << "\n";
  for (std::size_t i = 0; i < paths.front().times.size(); ++i) {
    out << num(paths.front().times[i]);
    for (const PathSample& p : paths) out << "," << num(p.rates[i]);
    out << "\n";
  }
}

}  // namespace jumprate
