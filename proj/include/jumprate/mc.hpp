#pragma once

#include "jumprate/price_result.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace jumprate {

struct PathConfig {
  std::int64_t n_paths = 10000;
  int steps_per_year = 512;
  std::uint64_t seed = 1;
  bool antithetic = false;
};

void validate(const PathConfig& cfg);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
};

/// Random stream of one path, reproducible from (seed, stream). A mirrored
/// stream returns -z for every normal draw and 1 - u for every uniform draw.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t stream, bool mirrored = false);

  double normal();
  double uniform();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  bool mirrored_;
};

/// Draw of a jump size.
double sample_jump(const JumpDistribution& law, PathRng& rng);

struct PathSample {
  std::vector<double> times;
  std::vector<double> rates;  // a relevant date appears twice: before and after its jump
  double terminal = 0.0;
  double discount = 1.0;      // exp(-int rho du - sum of rho at roll-overs)
};

/// Euler-Maruyama path on [t0, t1] with every relevant date of the timeline in
/// (t0, t1] as a grid point. Rate jumps are added after the diffusion step at
/// their date; roll-overs contribute exp(-rho) with rho taken after the jump.
/// The running integral uses the trapezoid rule on the continuous part.
PathSample simulate_path(const ModelSpec& model, const Timeline& timeline, double x0, double t0,
                         double t1, const PathConfig& cfg, PathRng& rng, bool record = true);

/// Mean and standard error of discounted payoff(rho_T) over the paths, where T
/// is the timeline's maturity. Antithetic pairs are averaged before the error
/// estimate. Sums are pairwise.
McEstimate mc_price(const ModelSpec& model, const Timeline& timeline, const Payoff& payoff,
                    double t0, double x0, const PathConfig& cfg);

}  // namespace jumprate
