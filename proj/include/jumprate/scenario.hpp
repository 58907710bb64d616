#pragma once

#include "jumprate/affine.hpp"
#include "jumprate/fd.hpp"
#include "jumprate/mc.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jumprate {

/// Invalid or unparsable scenario description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// c(t) = base + step / (1 + exp(-rate (t - centre))); constant when step = 0.
struct Coefficient {
  double base = 0.0;
  double step = 0.0;
  double rate = 0.0;
  double centre = 0.0;

  double operator()(double t) const;
  [[nodiscard]] bool constant() const noexcept { return step == 0.0; }
  bool operator==(const Coefficient&) const = default;
};

enum class ModelKind { Vasicek, HullWhite };

/// Vasicek: constant alpha, beta, sigma. Hull-White: time-dependent
/// alpha(t), beta(t) and sigma(t) with gamma = sigma^2, delta = 0.
struct ModelConfig {
  ModelKind kind = ModelKind::Vasicek;
  Coefficient alpha;
  Coefficient beta;
  Coefficient sigma;
  bool operator==(const ModelConfig&) const = default;
};

enum class ProductKind { Zcb, Call };

struct ProductConfig {
  ProductKind kind = ProductKind::Zcb;
  double maturity = 1.0;  // zcb
  CallSpec call;          // call
  bool operator==(const ProductConfig& o) const {
    return kind == o.kind && maturity == o.maturity && call.strike == o.call.strike &&
           call.option_expiry == o.call.option_expiry &&
           call.bond_maturity == o.call.bond_maturity;
  }
  /// Horizon of the backward sweep: zcb maturity or option expiry.
  [[nodiscard]] double horizon() const noexcept {
    return kind == ProductKind::Zcb ? maturity : call.option_expiry;
  }
};

struct NumericsConfig {
  double theta = 0.5;
  double dx = 5e-3;
  double dt = 4e-3;
  double x_min = -0.5;
  double x_max = 1.0;
  double tolerance = 1e-8;
  double jump_tolerance = 1e-10;
  std::optional<std::pair<double, double>> domain;
  bool operator==(const NumericsConfig&) const = default;
};

enum class Engine { ClosedForm, Fd, Semianalytic, Mc };

std::string engine_name(Engine e);

struct McConfig {
  PathConfig paths;
  std::vector<double> x0{0.0};
  bool operator==(const McConfig& o) const {
    return paths.n_paths == o.paths.n_paths && paths.steps_per_year == o.paths.steps_per_year &&
           paths.seed == o.paths.seed && paths.antithetic == o.paths.antithetic && x0 == o.x0;
  }
};

struct ScenarioConfig {
  std::string name;
  ModelConfig model;
  std::vector<RateJump> rate_jumps;
  std::vector<double> rollovers;
  ProductConfig product;
  NumericsConfig numerics;
  std::vector<Engine> engines;
  std::optional<McConfig> mc;
  bool operator==(const ScenarioConfig& o) const;
};

/// Parses the YAML scenario format; `source` names the input in messages.
/// Errors carry the line number of the offending node.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::string& path);
std::string serialize(const ScenarioConfig& cfg);

/// Throws ConfigError for inconsistent settings.
void validate(const ScenarioConfig& cfg);

ModelSpec build_model(const ModelConfig& cfg);
/// Relevant dates up to `maturity`.
Timeline build_timeline(const ScenarioConfig& cfg, double maturity);

}  // namespace jumprate
