#include "jumprate/affine.hpp"
#include "jumprate/semianalytic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace jumprate;

namespace {

const ConstantVasicek kCase{0.075, -0.3, 0.1};
const ModelSpec kModel = ModelSpec::vasicek(0.075, -0.3, 0.1);
const Payoff kOne = [](double) { return 1.0; };

Timeline case_timeline(int c) {
  std::vector<RateJump> j;
  std::vector<double> r;
  if (c >= 3) j.push_back({0.5, gaussian_jump(0.09, 0.5)});
  if (c % 2 == 0) r.push_back(0.8);
  return merge_relevant_dates(j, r, 1.0);
}

DomainCertificate case_domain(int c) {
  return c >= 3 ? certify_domain(kModel, case_timeline(c), -0.5, 1.0, -5.1204, 5.6196, 1.0)
                : certify_domain(kModel, case_timeline(c), -0.5, 1.0, -1.6, 2.065, 1.0);
}

// Values at t = 0 on the nodes of `fine` that also belong to `coarse`, inside [-0.5, 1].
double max_inner_gap(const PriceResult& coarse, const PriceResult& fine) {
  double worst = 0.0;
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < coarse.xs.size(); ++i) {
    const double x = coarse.xs[i];
    if (x < -0.5 - 1e-9 || x > 1.0 + 1e-9) continue;
    while (j < fine.xs.size() && fine.xs[j] < x - 1e-9) ++j;
    if (j < fine.xs.size() && std::abs(fine.xs[j] - x) < 1e-9) {
      worst = std::max(worst, std::abs(coarse.values[i] - fine.values[j]));
    }
  }
  return worst;
}

}  // namespace

TEST(GreenKernel, TimeHomogeneous) {
  const GreenKernel<double> k(kCase);
  for (double t : {0.0, 0.2, 0.65}) {
    const double s = t + 0.3;
    const double g = green_eval(k, t, s, 0.1, 0.2);
    EXPECT_GT(g, 0.0);
    EXPECT_NEAR(g / green_eval(k, 0.0, s - t, 0.1, 0.2), 1.0, 1e-14);
  }
  EXPECT_THROW(green_eval(k, 0.5, 0.5, 0.0, 0.0), ModelError);
  EXPECT_THROW(GreenKernel<double>(ConstantVasicek{0.1, 0.0, 0.1}), ModelError);
}

TEST(GreenKernel, DeltaLimit) {
  const GreenKernel<double> k(kCase);
  const auto phi = [](double x) { return std::exp(-x * x / 0.02) * std::cos(x); };
  const double tau = 1e-8;
  const auto h = k.horizon(tau);
  const double sd = std::sqrt(h.var);
  for (double x : {-0.2, 0.0, 0.15}) {
    const int n = 4000;
    const double lo = x - 40 * sd;
    const double step = 80 * sd / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double xi = lo + i * step;
      acc += (i == 0 || i == n ? 0.5 : 1.0) * green_eval(k, 0.0, tau, x, xi) * phi(xi);
    }
    EXPECT_NEAR(acc * step, phi(x), 1e-4);
  }
}

TEST(GreenKernel, SolvesBackwardEquation) {
  const GreenKernel<long double> k(kCase);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(0.0, 0.8);
  std::uniform_real_distribution<double> ux(-0.3, 0.5);
  std::uniform_real_distribution<double> uz(-1.0, 1.0);
  const long double s = 1.0L;
  const long double ht = 1e-6L;
  const long double hx = 1e-5L;
  for (int n = 0; n < 100; ++n) {
    const long double t = ut(rng);
    const long double x = ux(rng);
    const auto hz = k.horizon(s - t);
    const long double xi = hz.mean(x) + uz(rng) * std::sqrt(hz.var);
    const auto g = [&](long double tt, long double xx) { return k.eval(tt, s, xx, xi); };
    const long double g0 = g(t, x);
    const long double gt = (g(t + ht, x) - g(t - ht, x)) / (2 * ht);
    const long double gx = (g(t, x + hx) - g(t, x - hx)) / (2 * hx);
    const long double gxx = (g(t, x + hx) - 2 * g0 + g(t, x - hx)) / (hx * hx);
    const long double res = gt + (0.075L - 0.3L * x) * gx + 0.005L * gxx - x * g0;
    EXPECT_LE(static_cast<double>(std::abs(res) / std::max(1.0L, g0)), 1e-5);
  }
}

TEST(Propagate, ZeroStaysZero) {
  const GreenKernel<double> k(kCase);
  const Eigen::VectorXd xs = uniform_nodes(-1.0, 1.0, 0.01);
  const auto out = propagate_interval(k, GridFunction(xs, Eigen::VectorXd::Zero(xs.size())), 0.0, 1.0);
  EXPECT_EQ(out.vals().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(propagate_interval(k, out, 1.0, 0.5), ModelError);
}

TEST(Sweep, Case1RelativeErrorInInnerRegion) {
  const auto tl = case_timeline(1);
  const auto r = sweep_semianalytic(GreenKernel<double>(kCase), tl, kOne, case_domain(1), 5e-3);
  const auto co = zcb_coefficients(kModel, tl);
  const Eigen::VectorXd exact = zcb_prices(co, 0.0, r.xs);
  EXPECT_EQ(r.time_steps, 1);
  for (Eigen::Index i = 0; i < r.xs.size(); ++i) {
    if (r.xs[i] >= -0.5 - 1e-9 && r.xs[i] <= 1.0 + 1e-9) {
      EXPECT_LE(std::abs(r.values[i] / exact[i] - 1.0), 1e-10);
    }
  }
}

TEST(Sweep, MatchesClosedFormForAllCases) {
  for (int c = 1; c <= 4; ++c) {
    const auto tl = case_timeline(c);
    const auto co = zcb_coefficients(kModel, tl);
    const auto r = sweep_semianalytic(GreenKernel<double>(kCase), tl, kOne, case_domain(c), 5e-3);
    const auto e = max_mean_error(
        r, [&](double t, const Eigen::VectorXd& xs) { return zcb_prices(co, t, xs); }, -0.5, 1.0);
    EXPECT_LE(e.abs, 1e-12) << "case " << c;
  }
}

TEST(Sweep, LinearAndPositive) {
  const auto tl = case_timeline(4);
  const auto bond = zcb_coefficients(kModel, merge_relevant_dates({{0.5, gaussian_jump(0.09, 0.5)}}, {0.8}, 1.5));
  const Payoff call = [&](double x) { return std::max(zcb_price(bond, 1.0, x) - 0.5, 0.0); };
  const Payoff scaled = [&](double x) { return 3.7 * call(x); };
  const GreenKernel<double> k(kCase);
  const auto a = sweep_semianalytic(k, tl, call, case_domain(4), 1e-2);
  const auto b = sweep_semianalytic(k, tl, scaled, case_domain(4), 1e-2);
  for (Eigen::Index i = 0; i < a.xs.size(); ++i) {
    EXPECT_GE(a.values[i], -1e-15);
    EXPECT_NEAR(b.values[i], 3.7 * a.values[i], 1e-13 * std::max(1.0, std::abs(b.values[i])));
  }
}

TEST(Sweep, GridRefinementIsStable) {
  const GreenKernel<double> k(kCase);
  for (int c = 1; c <= 4; ++c) {
    const auto coarse = sweep_semianalytic(k, case_timeline(c), kOne, case_domain(c), 5e-3);
    const auto fine = sweep_semianalytic(k, case_timeline(c), kOne, case_domain(c), 2.5e-3);
    EXPECT_LE(max_inner_gap(coarse, fine), 1e-10) << "case " << c;
  }
}

TEST(Sweep, SnapshotsAtRelevantDates) {
  const auto r = sweep_semianalytic(GreenKernel<double>(kCase), case_timeline(4), kOne,
                                    case_domain(4), 1e-2);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_DOUBLE_EQ(r.snapshots[0].time, 0.8);
  EXPECT_DOUBLE_EQ(r.snapshots[1].time, 0.5);
  EXPECT_DOUBLE_EQ(r.snapshots[2].time, 0.0);
}
