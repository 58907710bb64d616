#include "jumprate/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace jumprate {

namespace {

[[noreturn]] void fail(const std::string& source, const YAML::Node& node, const std::string& msg) {
  std::ostringstream s;
  s << source;
  if (node.IsDefined() && node.Mark().line >= 0) s << ":" << node.Mark().line + 1;
  s << ": " << msg;
  throw ConfigError(s.str());
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail_at(const YAML::Node& node, const std::string& msg) const {
    fail(source_, node, msg);
  }

  void expect_map(const YAML::Node& node, const std::string& what,
                  const std::set<std::string>& allowed) const {
    if (!node.IsMap()) fail_at(node, what + " must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail_at(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& what) const {
    YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) fail_at(map, what + " requires '" + key + "'");
    return n;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail_at(n, what + " must be a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail_at(n, what + " must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail_at(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  template <typename T>
  T integer(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail_at(n, what + " must be an integer");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail_at(n, what + " must be an integer, got '" + n.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail_at(n, what + " must be true or false");
    }
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail_at(n, what + " must be a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail_at(n, what + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(number(e, what));
    return out;
  }

  Coefficient coefficient(const YAML::Node& n, const std::string& what) const {
    if (n.IsScalar()) return Coefficient{number(n, what), 0.0, 0.0, 0.0};
    expect_map(n, what, {"base", "step", "rate", "centre"});
    Coefficient c;
    c.base = number(require(n, "base", what), what + ".base");
    if (n["step"]) c.step = number(n["step"], what + ".step");
    if (n["rate"]) c.rate = number(n["rate"], what + ".rate");
    if (n["centre"]) c.centre = number(n["centre"], what + ".centre");
    return c;
  }

  ModelConfig model(const YAML::Node& n) const {
    expect_map(n, "model", {"kind", "alpha", "beta", "sigma"});
    ModelConfig m;
    const std::string kind = text(require(n, "kind", "model"), "model.kind");
    if (kind == "vasicek") {
      m.kind = ModelKind::Vasicek;
    } else if (kind == "hull_white") {
      m.kind = ModelKind::HullWhite;
    } else {
      fail_at(n["kind"], "model.kind must be vasicek or hull_white");
    }
    m.alpha = coefficient(require(n, "alpha", "model"), "model.alpha");
    m.beta = coefficient(require(n, "beta", "model"), "model.beta");
    m.sigma = coefficient(require(n, "sigma", "model"), "model.sigma");
    if (m.kind == ModelKind::Vasicek &&
        !(m.alpha.constant() && m.beta.constant() && m.sigma.constant())) {
      fail_at(n, "vasicek coefficients must be constant");
    }
    return m;
  }

  RateJump jump(const YAML::Node& n) const {
    expect_map(n, "rate jump", {"time", "law", "mean", "stdev", "size", "prob_up"});
    RateJump j;
    j.time = number(require(n, "time", "rate jump"), "rate jump time");
    const std::string law = text(require(n, "law", "rate jump"), "rate jump law");
    try {
      if (law == "gaussian") {
        j.law = gaussian_jump(number(require(n, "mean", "gaussian jump"), "mean"),
                              number(require(n, "stdev", "gaussian jump"), "stdev"));
      } else if (law == "two_point") {
        j.law = two_point_jump(number(require(n, "size", "two-point jump"), "size"),
                               number(require(n, "prob_up", "two-point jump"), "prob_up"));
      } else {
        fail_at(n["law"], "rate jump law must be gaussian or two_point");
      }
    } catch (const ModelError& e) {
      fail_at(n, e.what());
    }
    return j;
  }

  ProductConfig product(const YAML::Node& n) const {
    expect_map(n, "product", {"zcb", "call"});
    if (n.size() != 1) fail_at(n, "product must hold exactly one of zcb or call");
    ProductConfig p;
    if (n["zcb"]) {
      const YAML::Node z = n["zcb"];
      expect_map(z, "zcb", {"maturity"});
      p.kind = ProductKind::Zcb;
      p.maturity = number(require(z, "maturity", "zcb"), "zcb.maturity");
    } else {
      const YAML::Node c = n["call"];
      expect_map(c, "call", {"strike", "expiry", "bond_maturity"});
      p.kind = ProductKind::Call;
      p.call.strike = number(require(c, "strike", "call"), "call.strike");
      p.call.option_expiry = number(require(c, "expiry", "call"), "call.expiry");
      p.call.bond_maturity = number(require(c, "bond_maturity", "call"), "call.bond_maturity");
      p.maturity = p.call.option_expiry;
    }
    return p;
  }

  NumericsConfig numerics(const YAML::Node& n) const {
    expect_map(n, "numerics",
               {"theta", "dx", "dt", "region", "tolerance", "jump_tolerance", "domain"});
    NumericsConfig c;
    if (n["theta"]) c.theta = number(n["theta"], "numerics.theta");
    if (n["dx"]) c.dx = number(n["dx"], "numerics.dx");
    if (n["dt"]) c.dt = number(n["dt"], "numerics.dt");
    if (n["region"]) {
      const auto r = numbers(n["region"], "numerics.region");
      if (r.size() != 2) fail_at(n["region"], "numerics.region must be [x_min, x_max]");
      c.x_min = r[0];
      c.x_max = r[1];
    }
    if (n["tolerance"]) c.tolerance = number(n["tolerance"], "numerics.tolerance");
    if (n["jump_tolerance"]) c.jump_tolerance = number(n["jump_tolerance"], "numerics.jump_tolerance");
    if (n["domain"]) {
      const auto d = numbers(n["domain"], "numerics.domain");
      if (d.size() != 2) fail_at(n["domain"], "numerics.domain must be [lo, hi]");
      c.domain = std::make_pair(d[0], d[1]);
    }
    return c;
  }

  McConfig mc(const YAML::Node& n) const {
    expect_map(n, "mc", {"paths", "steps_per_year", "seed", "antithetic", "x0"});
    McConfig c;
    if (n["paths"]) c.paths.n_paths = integer<std::int64_t>(n["paths"], "mc.paths");
    if (n["steps_per_year"]) c.paths.steps_per_year = integer<int>(n["steps_per_year"], "mc.steps_per_year");
    if (n["seed"]) c.paths.seed = integer<std::uint64_t>(n["seed"], "mc.seed");
    if (n["antithetic"]) c.paths.antithetic = boolean(n["antithetic"], "mc.antithetic");
    if (n["x0"]) c.x0 = n["x0"].IsSequence() ? numbers(n["x0"], "mc.x0")
                                               : std::vector<double>{number(n["x0"], "mc.x0")};
    return c;
  }

  Engine engine(const YAML::Node& n) const {
    const std::string e = text(n, "engine");
    if (e == "closed_form") return Engine::ClosedForm;
    if (e == "fd") return Engine::Fd;
    if (e == "semianalytic") return Engine::Semianalytic;
    if (e == "mc") return Engine::Mc;
    fail_at(n, "unknown engine '" + e + "'");
  }

 private:
  std::string source_;
};

bool same_law(const JumpDistribution& a, const JumpDistribution& b) {
  if (a.index() != b.index()) return false;
  if (const auto* g = std::get_if<GaussianJump>(&a)) {
    const auto& h = std::get<GaussianJump>(b);
    return g->mean == h.mean && g->stdev == h.stdev;
  }
  const auto& p = std::get<TwoPointJump>(a);
  const auto& q = std::get<TwoPointJump>(b);
  return p.size == q.size && p.prob_up == q.prob_up;
}

void emit_coefficient(YAML::Emitter& out, const Coefficient& c) {
  if (c.constant() && c.rate == 0.0 && c.centre == 0.0) {
    out << c.base;
    return;
  }
  out << YAML::Flow << YAML::BeginMap << YAML::Key << "base" << YAML::Value << c.base
      << YAML::Key << "step" << YAML::Value << c.step << YAML::Key << "rate" << YAML::Value
      << c.rate << YAML::Key << "centre" << YAML::Value << c.centre << YAML::EndMap;
}

}  // namespace

double Coefficient::operator()(double t) const {
  if (step == 0.0) return base;
  return base + step / (1.0 + std::exp(-rate * (t - centre)));
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::ClosedForm: return "closed_form";
    case Engine::Fd: return "fd";
    case Engine::Semianalytic: return "semianalytic";
    case Engine::Mc: return "mc";
  }
  return "unknown";
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  if (rate_jumps.size() != o.rate_jumps.size()) return false;
  for (std::size_t i = 0; i < rate_jumps.size(); ++i) {
    if (rate_jumps[i].time != o.rate_jumps[i].time ||
        !same_law(rate_jumps[i].law, o.rate_jumps[i].law)) {
      return false;
    }
  }
  return name == o.name && model == o.model && rollovers == o.rollovers && product == o.product &&
         numerics == o.numerics && engines == o.engines && mc == o.mc;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader rd(source);
  rd.expect_map(root, "scenario",
                {"name", "model", "timeline", "product", "numerics", "engines", "mc"});

  ScenarioConfig cfg;
  cfg.name = rd.text(rd.require(root, "name", "scenario"), "name");
  cfg.model = rd.model(rd.require(root, "model", "scenario"));
  if (const YAML::Node tl = root["timeline"]; tl && !tl.IsNull()) {
    rd.expect_map(tl, "timeline", {"rate_jumps", "rollovers"});
    if (tl["rate_jumps"]) {
      if (!tl["rate_jumps"].IsSequence()) rd.fail_at(tl["rate_jumps"], "rate_jumps must be a list");
      for (const auto& j : tl["rate_jumps"]) cfg.rate_jumps.push_back(rd.jump(j));
    }
    if (tl["rollovers"]) cfg.rollovers = rd.numbers(tl["rollovers"], "timeline.rollovers");
  }
  cfg.product = rd.product(rd.require(root, "product", "scenario"));
  if (root["numerics"]) cfg.numerics = rd.numerics(root["numerics"]);
  const YAML::Node engines = rd.require(root, "engines", "scenario");
  if (!engines.IsSequence()) rd.fail_at(engines, "engines must be a list");
  for (const auto& e : engines) cfg.engines.push_back(rd.engine(e));
  if (root["mc"]) cfg.mc = rd.mc(root["mc"]);

  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    fail(source, root, e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string serialize(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.name;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value
      << (cfg.model.kind == ModelKind::Vasicek ? "vasicek" : "hull_white");
  out << YAML::Key << "alpha" << YAML::Value;
  emit_coefficient(out, cfg.model.alpha);
  out << YAML::Key << "beta" << YAML::Value;
  emit_coefficient(out, cfg.model.beta);
  out << YAML::Key << "sigma" << YAML::Value;
  emit_coefficient(out, cfg.model.sigma);
  out << YAML::EndMap;

  out << YAML::Key << "timeline" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rate_jumps" << YAML::Value << YAML::BeginSeq;
  for (const RateJump& j : cfg.rate_jumps) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "time" << YAML::Value << j.time;
    if (const auto* g = std::get_if<GaussianJump>(&j.law)) {
      out << YAML::Key << "law" << YAML::Value << "gaussian" << YAML::Key << "mean" << YAML::Value
          << g->mean << YAML::Key << "stdev" << YAML::Value << g->stdev;
    } else {
      const auto& tp = std::get<TwoPointJump>(j.law);
      out << YAML::Key << "law" << YAML::Value << "two_point" << YAML::Key << "size"
          << YAML::Value << tp.size << YAML::Key << "prob_up" << YAML::Value << tp.prob_up;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "rollovers" << YAML::Value << YAML::Flow << cfg.rollovers;
  out << YAML::EndMap;

  out << YAML::Key << "product" << YAML::Value << YAML::BeginMap;
  if (cfg.product.kind == ProductKind::Zcb) {
    out << YAML::Key << "zcb" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
        << "maturity" << YAML::Value << cfg.product.maturity << YAML::EndMap;
  } else {
    out << YAML::Key << "call" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
        << "strike" << YAML::Value << cfg.product.call.strike << YAML::Key << "expiry"
        << YAML::Value << cfg.product.call.option_expiry << YAML::Key << "bond_maturity"
        << YAML::Value << cfg.product.call.bond_maturity << YAML::EndMap;
  }
  out << YAML::EndMap;

  const NumericsConfig& n = cfg.numerics;
  out << YAML::Key << "numerics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta" << YAML::Value << n.theta;
  out << YAML::Key << "dx" << YAML::Value << n.dx;
  out << YAML::Key << "dt" << YAML::Value << n.dt;
  out << YAML::Key << "region" << YAML::Value << YAML::Flow << std::vector<double>{n.x_min, n.x_max};
  out << YAML::Key << "tolerance" << YAML::Value << n.tolerance;
  out << YAML::Key << "jump_tolerance" << YAML::Value << n.jump_tolerance;
  if (n.domain) {
    out << YAML::Key << "domain" << YAML::Value << YAML::Flow
        << std::vector<double>{n.domain->first, n.domain->second};
  }
  out << YAML::EndMap;

  out << YAML::Key << "engines" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Engine e : cfg.engines) out << engine_name(e);
  out << YAML::EndSeq;

  if (cfg.mc) {
    out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "paths" << YAML::Value << cfg.mc->paths.n_paths;
    out << YAML::Key << "steps_per_year" << YAML::Value << cfg.mc->paths.steps_per_year;
    out << YAML::Key << "seed" << YAML::Value << cfg.mc->paths.seed;
    out << YAML::Key << "antithetic" << YAML::Value << cfg.mc->paths.antithetic;
    out << YAML::Key << "x0" << YAML::Value << YAML::Flow << cfg.mc->x0;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.name.empty()) throw ConfigError("name must be non-empty");
  if (cfg.engines.empty()) throw ConfigError("engines must be non-empty");
  const ProductConfig& p = cfg.product;
  if (p.kind == ProductKind::Zcb) {
    if (!(p.maturity > 0.0)) throw ConfigError("zcb.maturity must be positive");
  } else {
    if (!(p.call.option_expiry > 0.0)) throw ConfigError("call.expiry must be positive");
    if (!(p.call.bond_maturity > p.call.option_expiry)) {
      throw ConfigError("call.bond_maturity must exceed call.expiry");
    }
    if (!(p.call.strike > 0.0)) throw ConfigError("call.strike must be positive");
  }
  const NumericsConfig& n = cfg.numerics;
  if (!(n.theta >= 0.0 && n.theta <= 1.0)) throw ConfigError("numerics.theta must lie in [0, 1]");
  if (!(n.dx > 0.0)) throw ConfigError("numerics.dx must be positive");
  if (!(n.dt > 0.0)) throw ConfigError("numerics.dt must be positive");
  if (!(n.x_min <= n.x_max)) throw ConfigError("numerics.region must satisfy x_min <= x_max");
  if (!(n.tolerance > 0.0 && n.tolerance <= 1e-2)) {
    throw ConfigError("numerics.tolerance must lie in (0, 1e-2]");
  }
  if (!(n.jump_tolerance > 0.0 && n.jump_tolerance <= 1e-2)) {
    throw ConfigError("numerics.jump_tolerance must lie in (0, 1e-2]");
  }
  if (n.domain && !(n.domain->first < n.x_min && n.x_max < n.domain->second)) {
    throw ConfigError("numerics.domain must strictly contain the region");
  }
  for (const RateJump& j : cfg.rate_jumps) {
    if (!(j.time > 0.0)) throw ConfigError("rate jump times must be positive");
  }
  for (double r : cfg.rollovers) {
    if (!(r > 0.0)) throw ConfigError("roll-over times must be positive");
  }
  if (cfg.model.kind == ModelKind::Vasicek) {
    if (!(cfg.model.sigma.base > 0.0)) throw ConfigError("vasicek sigma must be positive");
    if (cfg.model.beta.base == 0.0) throw ConfigError("vasicek beta must be non-zero");
  }
  for (Engine e : cfg.engines) {
    if (e == Engine::Mc && !cfg.mc) throw ConfigError("engine mc requires an mc block");
  }
  if (cfg.mc) {
    try {
      validate(cfg.mc->paths);
    } catch (const ModelError& e) {
      throw ConfigError(e.what());
    }
    if (cfg.mc->x0.empty()) throw ConfigError("mc.x0 must be non-empty");
  }
  try {
    (void)build_timeline(cfg, p.kind == ProductKind::Zcb ? p.maturity : p.call.bond_maturity);
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
}

ModelSpec build_model(const ModelConfig& cfg) {
  if (cfg.kind == ModelKind::Vasicek) {
    return ModelSpec::vasicek(cfg.alpha.base, cfg.beta.base, cfg.sigma.base);
  }
  const Coefficient a = cfg.alpha;
  const Coefficient b = cfg.beta;
  const Coefficient s = cfg.sigma;
  return ModelSpec::affine([a](double t) { return a(t); }, [b](double t) { return b(t); },
                           [s](double t) { return s(t) * s(t); }, [](double) { return 0.0; });
}

Timeline build_timeline(const ScenarioConfig& cfg, double maturity) {
  return merge_relevant_dates(cfg.rate_jumps, cfg.rollovers, maturity);
}

}  // namespace jumprate
