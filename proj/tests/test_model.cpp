#include "jumprate/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace jumprate;

TEST(ModelSpec, VasicekValidation) {
  EXPECT_THROW(ModelSpec::vasicek(0.075, -0.3, 0.0), ModelError);
  EXPECT_THROW(ModelSpec::vasicek(0.075, 0.0, 0.1), ModelError);
  const auto m = ModelSpec::vasicek(0.075, -0.3, 0.1);
  EXPECT_DOUBLE_EQ(m.drift(0.2, 0.5), 0.075 - 0.15);
  EXPECT_DOUBLE_EQ(m.variance(0.2, 3.0), 0.01);
  EXPECT_TRUE(m.is_affine());
  ASSERT_NE(m.as_vasicek(), nullptr);
}

TEST(ModelSpec, AffineVarianceMustBeNonNegative) {
  const auto cir = ModelSpec::affine([](double) { return 0.02; }, [](double) { return -0.5; },
                                     [](double) { return 0.0; }, [](double) { return 0.04; });
  EXPECT_DOUBLE_EQ(cir.variance(0.0, 0.25), 0.01);
  EXPECT_THROW((void)cir.variance(0.0, -0.1), ModelError);
}

TEST(JumpLaw, LogMgfExamples) {
  EXPECT_NEAR(log_mgf_neg(gaussian_jump(0.09, 0.5), 1.0), 0.035, 1e-15);
  EXPECT_EQ(log_mgf_neg(two_point_jump(0.09, 0.7), 0.0), 0.0);
  EXPECT_EQ(log_mgf_neg(gaussian_jump(0.09, 0.5), 0.0), 0.0);
  EXPECT_NEAR(log_mgf_neg(gaussian_jump(0.3, 0.0), 2.5), -0.75, 1e-15);
  const double b = 0.7;
  EXPECT_NEAR(log_mgf_neg(two_point_jump(0.09, 0.7), b),
              std::log(0.7 * std::exp(-0.09 * b) + 0.3 * std::exp(0.09 * b)), 1e-15);
}

TEST(JumpLaw, GaussianLogMgfAgreesWithQuadrature) {
  const double m = 0.09;
  const double s = 0.5;
  const double b = 1.3;
  double acc = 0.0;
  const double h = 1e-3;
  for (double z = m - 12 * s; z <= m + 12 * s; z += h) {
    acc += std::exp(-z * b) * std::exp(-0.5 * std::pow((z - m) / s, 2)) / (s * std::sqrt(2 * M_PI));
  }
  EXPECT_NEAR(log_mgf_neg(gaussian_jump(m, s), b), std::log(acc * h), 1e-10);
}

TEST(JumpLaw, GaussianLogMgfIsConvex) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto law = gaussian_jump(0.09, 0.5);
  for (int k = 0; k < 200; ++k) {
    const double b1 = u(rng);
    const double b2 = u(rng);
    const double lam = 0.5 + 0.1 * u(rng);
    EXPECT_LE(log_mgf_neg(law, lam * b1 + (1 - lam) * b2),
              lam * log_mgf_neg(law, b1) + (1 - lam) * log_mgf_neg(law, b2) + 1e-12);
  }
}

TEST(JumpLaw, RejectsInvalidParameters) {
  EXPECT_THROW(gaussian_jump(0.0, -1.0), ModelError);
  EXPECT_THROW(two_point_jump(0.1, 1.5), ModelError);
}

TEST(Timeline, MergesDates) {
  auto tl = merge_relevant_dates({{0.5, gaussian_jump(0.09, 0.5)}}, {0.8}, 1.0);
  ASSERT_EQ(tl.relevant().size(), 2u);
  EXPECT_EQ(tl.relevant()[0].kind, DateKind::RateJumpOnly);
  EXPECT_EQ(tl.relevant()[1].kind, DateKind::RolloverOnly);
  EXPECT_DOUBLE_EQ(tl.relevant()[1].time, 0.8);
  EXPECT_EQ(tl.breakpoints(), (std::vector<double>{0.0, 0.5, 0.8, 1.0}));
  EXPECT_DOUBLE_EQ(tl.longest_interval(), 0.5);

  EXPECT_TRUE(merge_relevant_dates({}, {}, 1.0).relevant().empty());

  auto both = merge_relevant_dates({{0.8, gaussian_jump(0.0, 0.1)}}, {0.8}, 1.0);
  ASSERT_EQ(both.relevant().size(), 1u);
  EXPECT_EQ(both.relevant()[0].kind, DateKind::Both);
  EXPECT_TRUE(both.has_common_dates());
}

TEST(Timeline, DropsDatesAfterMaturityAndKeepsMaturity) {
  auto tl = merge_relevant_dates({{1.2, gaussian_jump(0.0, 0.1)}}, {0.5, 1.0}, 1.0);
  ASSERT_EQ(tl.relevant().size(), 2u);
  EXPECT_DOUBLE_EQ(tl.relevant()[1].time, 1.0);
}

TEST(Timeline, RejectsUnorderedDates) {
  EXPECT_THROW(merge_relevant_dates({}, {0.8, 0.5}, 1.0), ModelError);
  EXPECT_THROW(merge_relevant_dates({}, {-0.1}, 1.0), ModelError);
}

TEST(Timeline, MergeIsIdempotent) {
  auto tl = merge_relevant_dates({{0.3, gaussian_jump(0.0, 0.1)}, {0.6, two_point_jump(0.1, 0.5)}},
                                 {0.45, 0.6}, 1.0);
  auto again = merge_relevant_dates(tl.rate_jumps(), tl.rollovers(), tl.maturity());
  ASSERT_EQ(tl.relevant().size(), again.relevant().size());
  for (std::size_t i = 0; i < tl.relevant().size(); ++i) {
    EXPECT_EQ(tl.relevant()[i].time, again.relevant()[i].time);
    EXPECT_EQ(tl.relevant()[i].kind, again.relevant()[i].kind);
  }
}

TEST(Grid, UniformNodesContainRegionEnds) {
  const Eigen::VectorXd xs = uniform_nodes(-1.6, 2.065, 5e-3);
  bool lo = false;
  bool hi = false;
  for (double x : xs) {
    lo |= std::abs(x + 0.5) < 1e-12;
    hi |= std::abs(x - 1.0) < 1e-12;
  }
  EXPECT_TRUE(lo && hi);
  EXPECT_TRUE(GridFunction(xs, Eigen::VectorXd::Zero(xs.size())).uniform());
}

namespace {

GridFunction grid_of(double lo, double hi, double dx, const std::function<double(double)>& f) {
  Eigen::VectorXd xs = uniform_nodes(lo, hi, dx);
  return GridFunction(xs, xs.unaryExpr(f));
}

}  // namespace

TEST(JumpCondition, RolloverMultipliesByDiscount) {
  const auto g = grid_of(-1.0, 1.0, 0.5, [](double) { return 2.0; });
  const auto out = apply_jump_condition(g, DateKind::RolloverOnly, std::nullopt);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    EXPECT_DOUBLE_EQ(out.vals()[i], 2.0 * std::exp(-g.xs()[i]));
    EXPECT_GT(out.vals()[i], 0.0);
  }
}

TEST(JumpCondition, TwoPointShift) {
  const auto g = grid_of(-1.0, 1.0, 0.01, [](double x) { return x; });
  const auto out = apply_jump_condition(g, DateKind::RateJumpOnly, two_point_jump(0.09, 0.7));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(g.xs()[i]) < 1e-12) EXPECT_NEAR(out.vals()[i], 0.036, 1e-15);
  }
  EXPECT_THROW(apply_jump_condition(g, DateKind::RateJumpOnly, two_point_jump(0.095, 0.7)),
               ModelError);
}

TEST(JumpCondition, GaussianPreservesConstantsInside) {
  const auto g = grid_of(-5.1204, 5.6196, 5e-3, [](double) { return 1.0; });
  const auto out = apply_jump_condition(g, DateKind::RateJumpOnly, gaussian_jump(0.09, 0.5));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double x = g.xs()[i];
    if (x >= -0.5 && x <= 1.0) {
      EXPECT_LE(out.vals()[i], 1.0 + 1e-14);
      EXPECT_GE(out.vals()[i], 1.0 - 1e-12);
    }
  }
}

TEST(JumpCondition, GaussianShiftsLinearFunctions) {
  const auto g = grid_of(-6.0, 6.0, 1e-2, [](double x) { return x; });
  const auto out = apply_jump_condition(g, DateKind::RateJumpOnly, gaussian_jump(0.09, 0.5));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(g.xs()[i]) <= 1.0) EXPECT_NEAR(out.vals()[i], g.xs()[i] + 0.09, 1e-12);
  }
}

TEST(JumpCondition, NarrowGaussianIsIdentity) {
  const auto g = grid_of(-1.0, 1.0, 1e-2, [](double x) { return std::sin(3 * x); });
  const auto out = apply_jump_condition(g, DateKind::RateJumpOnly, gaussian_jump(0.0, 1e-8));
  const Eigen::Index n = g.size();
  // The interpolant's kinks contribute O(stdev * dx * max|g''|) = 9e-10 here.
  EXPECT_LT((out.vals() - g.vals()).segment(1, n - 2).cwiseAbs().maxCoeff(), 9e-10);
  // Half of the density falls outside the domain at an end node; the
  // remaining half sees a first moment of order stdev * max|g'|.
  EXPECT_NEAR(out.vals()[0], 0.5 * g.vals()[0], 3e-8);
  EXPECT_NEAR(out.vals()[n - 1], 0.5 * g.vals()[n - 1], 3e-8);
}

TEST(JumpCondition, CommonDateDiscountsBeforeAveraging) {
  const auto g = grid_of(-1.0, 1.0, 0.01, [](double) { return 1.0; });
  const auto out = apply_jump_condition(g, DateKind::Both, two_point_jump(0.09, 0.7));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double x = g.xs()[i];
    if (std::abs(x) < 1e-12) {
      EXPECT_NEAR(out.vals()[i], 0.7 * std::exp(-0.09) + 0.3 * std::exp(0.09), 1e-14);
    }
  }
}

TEST(JumpCondition, MassOutside) {
  EXPECT_NEAR(jump_mass_outside(gaussian_jump(0.0, 1.0), -1.0, 1.0, 0.0, 0.0),
              std::erfc(1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_EQ(jump_mass_outside(two_point_jump(0.1, 0.5), -1.0, 1.0, -0.5, 0.5), 0.0);
}
