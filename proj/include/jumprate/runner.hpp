#pragma once

#include "jumprate/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace jumprate {

/// Failure inside one engine; the message starts with the engine name.
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-in-time mean-in-x error of `engine` against `reference` over the region.
struct PairError {
  std::string engine;
  std::string reference;
  ErrorSummary error;
};

struct McRow {
  double x0 = 0.0;
  McEstimate estimate;
  double reference = 0.0;  // NaN when no reference engine ran
  std::string reference_engine;
};

struct ScenarioRun {
  ScenarioConfig config;
  DomainCertificate domain;
  std::vector<PriceResult> results;  // grid engines, closed form first when present
  std::vector<PairError> errors;
  std::vector<McRow> mc;
};

/// Domain for the scenario: localized from the region, or the configured one
/// together with its measured certificate.
DomainCertificate scenario_domain(const ScenarioConfig& cfg);

/// Runs every configured engine once at cfg.numerics.dx.
ScenarioRun run_scenario(const ScenarioConfig& cfg);

/// Monte-Carlo estimates at the configured start rates.
std::vector<McRow> run_mc(const ScenarioConfig& cfg, const McConfig& mc);

struct ConvergenceRow {
  double dx = 0.0;
  std::vector<PairError> errors;
};

struct ConvergenceTable {
  ScenarioConfig config;
  DomainCertificate domain;
  std::vector<ConvergenceRow> rows;
  std::vector<std::pair<std::string, double>> slopes;  // per engine pair
};

/// Runs the grid engines over a descending ladder of at least three dx values.
ConvergenceTable convergence_study(const ScenarioConfig& cfg, const std::vector<double>& ladder);

/// CSV writers: '#' metadata lines, one header row, data rows with 17 significant digits.
void write_prices_csv(const ScenarioRun& run, std::ostream& out);
void write_errors_csv(const ScenarioRun& run, std::ostream& out);
void write_mc_csv(const ScenarioConfig& cfg, const std::vector<McRow>& rows, std::ostream& out);
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);
void write_domain_csv(const ScenarioConfig& cfg, const DomainCertificate& d, std::ostream& out);

/// Sample trajectories on the simulation grid: columns t, path_0, path_1, ...
void write_paths_csv(const ScenarioConfig& cfg, int n_paths, std::uint64_t seed, double x0,
                     std::ostream& out);

}  // namespace jumprate
