#include "jumprate/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace jumprate;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

fs::path output_dir() {
  const char* env = std::getenv("JUMPRATE_OUTPUT_DIR");
  fs::path dir = (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("results");
  fs::create_directories(dir);
  return dir;
}

template <typename Writer>
fs::path write_file(const std::string& name, Writer&& writer) {
  const fs::path path = output_dir() / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  std::cout << "wrote " << path.string() << "\n";
  return path;
}

int cmd_price(const std::string& config, double dx) {
  ScenarioConfig cfg = load_scenario(config);
  if (dx > 0.0) cfg.numerics.dx = dx;
  const ScenarioRun run = run_scenario(cfg);
  std::cout << cfg.name << ": domain [" << run.domain.a_lo << ", " << run.domain.a_hi << "]\n";
  for (const PairError& e : run.errors) {
    std::cout << "  " << e.engine << " vs " << e.reference << ": max-mean abs error "
              << e.error.abs << "\n";
  }
  for (const McRow& r : run.mc) {
    std::cout << "  mc x0=" << r.x0 << ": " << r.estimate.mean << " +/- " << r.estimate.std_error
              << " (reference " << r.reference << ")\n";
  }
  if (!run.results.empty()) {
    write_file(cfg.name + "_prices.csv", [&](std::ostream& o) { write_prices_csv(run, o); });
  }
  if (!run.errors.empty()) {
    write_file(cfg.name + "_errors.csv", [&](std::ostream& o) { write_errors_csv(run, o); });
  }
  if (!run.mc.empty()) {
    write_file(cfg.name + "_mc.csv", [&](std::ostream& o) { write_mc_csv(cfg, run.mc, o); });
  }
  return kOk;
}

int cmd_converge(const std::string& config, const std::vector<double>& ladder) {
  const ScenarioConfig cfg = load_scenario(config);
  const ConvergenceTable table = convergence_study(cfg, ladder);
  for (const ConvergenceRow& row : table.rows) {
    std::cout << "dx=" << row.dx;
    for (const PairError& e : row.errors) {
      std::cout << "  " << e.engine << "/" << e.reference << "=" << e.error.abs;
    }
    std::cout << "\n";
  }
  for (const auto& [pair, slope] : table.slopes) std::cout << "slope " << pair << ": " << slope << "\n";
  write_file(cfg.name + "_convergence.csv", [&](std::ostream& o) { write_convergence_csv(table, o); });
  return kOk;
}

int cmd_simulate(const std::string& config, std::int64_t paths, std::uint64_t seed,
                 int trajectories, std::optional<double> x0) {
  ScenarioConfig cfg = load_scenario(config);
  McConfig mc = cfg.mc.value_or(McConfig{});
  if (paths > 0) mc.paths.n_paths = paths;
  mc.paths.seed = seed;
  if (x0) mc.x0 = {*x0};
  cfg.mc = mc;
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(config + ": " + e.what());
  }
  const std::vector<McRow> rows = run_mc(cfg, mc);
  for (const McRow& r : rows) {
    std::cout << "x0=" << r.x0 << ": " << r.estimate.mean << " +/- " << r.estimate.std_error
              << " (reference " << r.reference << ")\n";
  }
  write_file(cfg.name + "_mc.csv", [&](std::ostream& o) { write_mc_csv(cfg, rows, o); });
  if (trajectories > 0) {
    write_file(cfg.name + "_paths.csv", [&](std::ostream& o) {
      write_paths_csv(cfg, trajectories, seed, mc.x0.front(), o);
    });
  }
  return kOk;
}

int cmd_localize(const std::string& config) {
  const ScenarioConfig cfg = load_scenario(config);
  const DomainCertificate d = scenario_domain(cfg);
  std::cout << cfg.name << ": domain [" << d.a_lo << ", " << d.a_hi << "], M=" << d.M
            << ", M_bar=" << d.M_bar << ", eps_kernel=" << d.eps_kernel
            << ", eps_jump=" << d.eps_jump << (d.heuristic ? " (heuristic)" : "") << "\n";
  write_file(cfg.name + "_domain.csv", [&](std::ostream& o) { write_domain_csv(cfg, d, o); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short-rate pricing with fixed-date jumps and roll-overs"};
  app.require_subcommand(1);

  std::string config;
  double dx = 0.0;
  auto* price = app.add_subcommand("price", "Run every engine of a scenario");
  price->add_option("config", config, "Scenario file")->required();
  price->add_option("--dx", dx, "Override the grid spacing");

  std::vector<double> ladder;
  auto* converge = app.add_subcommand("converge", "Error table over a dx ladder");
  converge->add_option("config", config, "Scenario file")->required();
  converge->add_option("--dx", ladder, "Descending dx ladder, comma separated")
      ->required()
      ->delimiter(',');

  std::int64_t paths = 0;
  std::uint64_t seed = 1;
  int trajectories = 0;
  std::optional<double> x0;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimates and sample paths");
  simulate->add_option("config", config, "Scenario file")->required();
  simulate->add_option("--paths", paths, "Number of paths");
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--trajectories", trajectories, "Sample paths to write");
  simulate->add_option("--x0", x0, "Starting short rate");

  auto* localize = app.add_subcommand("localize", "Certified computational domain");
  localize->add_option("config", config, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*price) return cmd_price(config, dx);
    if (*converge) return cmd_converge(config, ladder);
    if (*simulate) return cmd_simulate(config, paths, seed, trajectories, x0);
    return cmd_localize(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}
