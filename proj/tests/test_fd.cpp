#include "jumprate/affine.hpp"
#include "jumprate/fd.hpp"
#include "jumprate/semianalytic.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

using namespace jumprate;

namespace {

const ModelSpec kModel = ModelSpec::vasicek(0.075, -0.3, 0.1);
const Payoff kOne = [](double) { return 1.0; };

std::vector<RateJump> case_jumps(int c, bool discrete = false) {
  if (c < 3) return {};
  return {{0.5, discrete ? two_point_jump(0.09, 0.7) : gaussian_jump(0.09, 0.5)}};
}

std::vector<double> case_rollovers(int c) { return c % 2 == 0 ? std::vector<double>{0.8} : std::vector<double>{}; }

Timeline case_timeline(int c, bool discrete = false) {
  return merge_relevant_dates(case_jumps(c, discrete), case_rollovers(c), 1.0);
}

FdConfig case_config(int c, double dx, bool discrete = false) {
  const bool wide = c >= 3 && !discrete;
  const double lo = wide ? -5.1204 : -1.6;
  const double hi = wide ? 5.6196 : 2.065;
  return {0.5, dx, 4e-3, certify_domain(kModel, case_timeline(c, discrete), -0.5, 1.0, lo, hi, 1.0)};
}

double zcb_error(int c, double dx, bool discrete = false) {
  const auto tl = case_timeline(c, discrete);
  const auto co = zcb_coefficients(kModel, tl);
  const auto r = sweep_fd(kModel, tl, kOne, case_config(c, dx, discrete));
  return max_mean_error(
             r, [&](double t, const Eigen::VectorXd& xs) { return zcb_prices(co, t, xs); }, -0.5, 1.0)
      .abs;
}

GridFunction grid(double lo, double hi, double dx, const std::function<double(double)>& f) {
  const Eigen::VectorXd xs = uniform_nodes(lo, hi, dx);
  return GridFunction(xs, xs.unaryExpr(f));
}

// Dense form of one theta step built directly from the scheme, with the
// three-point first row left unfolded.
Eigen::VectorXd dense_step(const ModelSpec& m, double theta, const GridFunction& v_next,
                           double t_next, double dt) {
  const Eigen::Index n = v_next.size();
  const auto& x = v_next.xs();
  const auto& v = v_next.vals();
  const double h = v_next.dx();
  const double t_now = t_next - dt;
  // Discrete operator L at time t: row i gives the coefficients on V.
  auto op = [&](double t) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double s2 = m.variance(t, x[i]);
      const double mu = m.drift(t, x[i]);
      L(i, i - 1) = 0.5 * s2 / (h * h) - mu / (2 * h);
      L(i, i) = -s2 / (h * h) - x[i];
      L(i, i + 1) = 0.5 * s2 / (h * h) + mu / (2 * h);
    }
    const double s0 = m.variance(t, x[0]);
    const double m0 = m.drift(t, x[0]);
    L(0, 0) = 0.5 * s0 / (h * h) - m0 / h - x[0];
    L(0, 1) = -s0 / (h * h) + m0 / h;
    L(0, 2) = 0.5 * s0 / (h * h);
    const double mn = m.drift(t, x[n - 1]);
    L(n - 1, n - 2) = -mn / h;
    L(n - 1, n - 1) = mn / h - x[n - 1];
    return L;
  };
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A = I / dt - (1.0 - theta) * op(t_now);
  const Eigen::VectorXd b = v / dt + theta * (op(t_next) * v);
  return A.partialPivLu().solve(b);
}

}  // namespace

TEST(Assemble, ExplicitStepIsDiagonal) {
  const auto v = grid(-1.0, 1.0, 0.05, [](double x) { return std::exp(-x); });
  const auto sys = assemble_step(kModel, 1.0, v, 0.5, 0.01);
  EXPECT_EQ(sys.sub.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sys.sup.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((sys.diag.array() - 100.0).abs().maxCoeff(), 1e-12);
}

TEST(Assemble, ZeroPropagates) {
  const auto v = grid(-1.0, 1.0, 0.05, [](double) { return 0.0; });
  for (double theta : {0.0, 0.5}) {
    EXPECT_EQ(theta_step(kModel, theta, v, 0.5, 0.01).vals().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Assemble, Preconditions) {
  const auto v = grid(-1.0, 1.0, 0.05, [](double) { return 1.0; });
  EXPECT_THROW(assemble_step(kModel, 0.5, v, 0.5, 0.0), ModelError);
  EXPECT_THROW(assemble_step(kModel, 0.5, grid(0.0, 0.1, 0.05, [](double) { return 1.0; }), 0.5, 0.1),
               ModelError);
  FdConfig cfg{0.5, 0.05, 4e-3, {}};
  cfg.domain.a_lo = 0.0;
  cfg.domain.a_hi = 0.1;
  EXPECT_THROW(validate(cfg, kModel), ModelError);
  cfg.domain.a_hi = 1.0;
  cfg.dt = -1.0;
  EXPECT_THROW(validate(cfg, kModel), ModelError);
  cfg.dt = 4e-3;
  cfg.theta = 1.5;
  EXPECT_THROW(validate(cfg, kModel), ModelError);
}

TEST(Assemble, StepMatchesDenseOracle) {
  const auto v = grid(-1.0, 1.5, 0.02, [](double x) { return std::exp(-0.7 * x) + 0.1 * x * x; });
  const ModelSpec hw = ModelSpec::affine([](double t) { return 0.05 + 0.02 * t; },
                                         [](double t) { return -0.3 - 0.5 * t; },
                                         [](double t) { return 0.01 * (1.0 + t); },
                                         [](double) { return 0.0; });
  for (const ModelSpec* m : {&kModel, &hw}) {
    for (double theta : {0.0, 0.5, 1.0}) {
      const Eigen::VectorXd got = theta_step(*m, theta, v, 0.6, 0.01).vals();
      const Eigen::VectorXd want = dense_step(*m, theta, v, 0.6, 0.01);
      EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff())
          << "theta " << theta;
    }
  }
}

TEST(Assemble, ExactSolutionResidualIsSecondOrder) {
  const auto co = zcb_coefficients(kModel, case_timeline(1));
  const std::vector<double> hs{2e-2, 1e-2, 5e-3, 2.5e-3};
  std::vector<double> res;
  for (double h : hs) {
    const double t_next = 0.6;
    const double dt = h;
    const auto exact = [&](double t) {
      return grid(-0.5, 1.0, h, [&](double x) { return zcb_price(co, t, x); });
    };
    const auto sys = assemble_step(kModel, 0.5, exact(t_next), t_next, dt);
    const Eigen::VectorXd r = sys.apply(exact(t_next - dt).vals()) - sys.rhs;
    res.push_back(r.segment(2, r.size() - 4).cwiseAbs().maxCoeff());
  }
  EXPECT_GE(loglog_slope(hs, res), 1.8);
}

TEST(Sweep, ImplicitStaysInUnitInterval) {
  const ModelSpec m = kModel;
  const auto tl = merge_relevant_dates({}, {}, 1.0);
  const FdConfig cfg{0.0, 5e-3, 4e-3, certify_domain(m, tl, 0.2, 1.5, 0.0, 2.0, 1.0)};
  const auto r = sweep_fd(m, tl, [](double x) { return 0.5 * (1.0 + std::sin(9.0 * x)); }, cfg);
  for (const auto& s : r.snapshots) {
    EXPECT_GE(s.values.minCoeff(), -1e-9);
    EXPECT_LE(s.values.maxCoeff(), 1.0 + 1e-9);
  }
}

TEST(Sweep, ZcbAccuracy) {
  EXPECT_LE(zcb_error(2, 5e-3), 2.5e-6);
  EXPECT_LE(zcb_error(4, 5e-3), 3.2e-6);
}

TEST(Sweep, ConvergenceRatios) {
  const std::vector<double> ladder{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  std::vector<double> err;
  for (double dx : ladder) err.push_back(zcb_error(2, dx));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    EXPECT_GE(ratio, 2.5) << "rung " << i;
    EXPECT_LE(ratio, 6.0) << "rung " << i;
  }
}

TEST(Sweep, CallAccuracy) {
  const CallSpec spec{0.5, 1.0, 1.5};
  for (auto [c, dx, tol] : {std::tuple{1, 1e-2, 5e-6}, std::tuple{4, 1.25e-3, 4.5e-7}}) {
    const VasicekCallPricer pricer(kModel, case_jumps(c), case_rollovers(c), spec);
    const Payoff payoff = [&](double x) { return std::max(pricer.bond_price(1.0, x) - 0.5, 0.0); };
    const auto r = sweep_fd(kModel, case_timeline(c), payoff, case_config(c, dx));
    const auto e = max_mean_error(
        r, [&](double t, const Eigen::VectorXd& xs) { return pricer.prices(t, xs); }, -0.5, 1.0);
    EXPECT_LE(e.abs, tol) << "case " << c;
  }
}

TEST(Sweep, AgreesWithSemianalyticOnDiscreteCall) {
  const CallSpec spec{0.5, 1.0, 1.5};
  const std::vector<double> tol{3 * 1.44e-8, 3 * 7.08e-8};
  for (int c : {3, 4}) {
    const auto tl = case_timeline(c, true);
    const auto bond = zcb_coefficients(kModel, merge_relevant_dates(case_jumps(c, true), case_rollovers(c), 1.5));
    const Payoff payoff = [&](double x) { return std::max(zcb_price(bond, 1.0, x) - 0.5, 0.0); };
    const auto cfg = case_config(c, 1.25e-3, true);
    const auto fd = sweep_fd(kModel, tl, payoff, cfg);
    const auto sa = sweep_semianalytic(GreenKernel<double>(*kModel.as_vasicek()), tl, payoff,
                                       cfg.domain, 1.25e-3);
    EXPECT_LE(initial_error(fd, sa, -0.5, 1.0).abs, tol[c - 3]) << "case " << c;
  }
}

TEST(Sweep, ExplicitStabilityWarning) {
  const auto tl = case_timeline(1);
  FdConfig cfg{1.0, 5e-3, 4e-3, certify_domain(kModel, tl, -0.5, 1.0, -1.6, 2.065, 1.0)};
  EXPECT_FALSE(validate(cfg, kModel).empty());
  cfg.dt = 1e-3;
  EXPECT_TRUE(validate(cfg, kModel).empty());
  cfg.theta = 0.5;
  cfg.dt = 4e-3;
  EXPECT_TRUE(validate(cfg, kModel).empty());
}

TEST(Sweep, TwoPointMisalignmentSurfaces) {
  const auto tl = merge_relevant_dates({{0.5, two_point_jump(0.0123, 0.5)}}, {}, 1.0);
  const FdConfig cfg{0.5, 5e-3, 4e-3, certify_domain(kModel, tl, -0.5, 1.0, -1.6, 2.065, 1.0)};
  EXPECT_THROW(sweep_fd(kModel, tl, kOne, cfg), ModelError);
}
