#include "jumprate/mc.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace jumprate {

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

void validate(const PathConfig& cfg) {
  if (cfg.n_paths < 2) throw ModelError("mc: n_paths must be at least 2");
  if (cfg.steps_per_year < 16) throw ModelError("mc: steps_per_year must be at least 16");
  if (cfg.antithetic && (cfg.n_paths % 2 != 0 || cfg.n_paths < 4)) {
    throw ModelError("mc: antithetic sampling needs an even n_paths of at least 4");
  }
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream, bool mirrored)
    : mirrored_(mirrored) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double PathRng::normal() {
  const double z = normal_(engine_);
  return mirrored_ ? -z : z;
}

double PathRng::uniform() {
  const double u = uniform_(engine_);
  return mirrored_ ? 1.0 - u : u;
}

double sample_jump(const JumpDistribution& law, PathRng& rng) {
  if (const auto* g = std::get_if<GaussianJump>(&law)) return g->mean + g->stdev * rng.normal();
  const auto& tp = std::get<TwoPointJump>(law);
  return rng.uniform() < tp.prob_up ? tp.size : -tp.size;
}

PathSample simulate_path(const ModelSpec& model, const Timeline& timeline, double x0, double t0,
                         double t1, const PathConfig& cfg, PathRng& rng, bool record) {
  if (!(t0 < t1)) throw ModelError("simulate_path: requires t0 < t1");
  if (!std::isfinite(x0)) throw ModelError("simulate_path: x0 must be finite");

  PathSample p;
  double x = x0;
  double t = t0;
  double integral = 0.0;
  double point_mass = 0.0;
  if (record) {
    p.times.push_back(t);
    p.rates.push_back(x);
  }

  auto diffuse = [&](double to) {
    const double len = to - t;
    if (len <= 0.0) return;
    const auto n = std::max(1L, static_cast<long>(std::ceil(len * cfg.steps_per_year - 1e-9)));
    const double h = len / static_cast<double>(n);
    const double sq = std::sqrt(h);
    for (long k = 0; k < n; ++k) {
      const double tk = t + h * static_cast<double>(k);
      const double next = x + model.drift(tk, x) * h + model.volatility(tk, x) * sq * rng.normal();
      integral += 0.5 * (x + next) * h;
      x = next;
      if (record) {
        p.times.push_back(k + 1 == n ? to : tk + h);
        p.rates.push_back(x);
      }
    }
    t = to;
  };

  for (const RelevantDate& d : timeline.relevant()) {
    if (d.time <= t0 || d.time > t1) continue;
    diffuse(d.time);
    if (d.kind != DateKind::RolloverOnly) x += sample_jump(*d.law, rng);
    if (d.kind != DateKind::RateJumpOnly) point_mass += x;
    if (record) {
      p.times.push_back(t);
      p.rates.push_back(x);
    }
  }
  diffuse(t1);
  p.terminal = x;
  p.discount = std::exp(-integral - point_mass);
  return p;
}

McEstimate mc_price(const ModelSpec& model, const Timeline& timeline, const Payoff& payoff,
                    double t0, double x0, const PathConfig& cfg) {
  validate(cfg);
  const double t1 = timeline.maturity();
  const std::int64_t groups = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  std::vector<double> samples(static_cast<std::size_t>(groups));
  for (std::int64_t g = 0; g < groups; ++g) {
    const auto stream = static_cast<std::uint64_t>(g);
    PathRng rng(cfg.seed, stream);
    PathSample p = simulate_path(model, timeline, x0, t0, t1, cfg, rng, false);
    double v = p.discount * payoff(p.terminal);
    if (cfg.antithetic) {
      PathRng mirror(cfg.seed, stream, true);
      PathSample q = simulate_path(model, timeline, x0, t0, t1, cfg, mirror, false);
      v = 0.5 * (v + q.discount * payoff(q.terminal));
    }
    samples[static_cast<std::size_t>(g)] = v;
  }
  const double n = static_cast<double>(groups);
  const double mean = pairwise_sum(samples) / n;
  std::vector<double> dev(samples.size());
  std::transform(samples.begin(), samples.end(), dev.begin(),
                 [mean](double s) { return (s - mean) * (s - mean); });
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n), cfg.n_paths};
}

}  // namespace jumprate
