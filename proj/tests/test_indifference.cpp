#include "realopt/indifference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "realopt/errors.hpp"

namespace realopt {
namespace {

using testing::base_market;
using testing::uniform;

LatticeCalibration complete_lattice() {
  // Traded asset and project move together: p2 = p3 = 0.
  LatticeCalibration cal;
  cal.dt = 0.01;
  cal.u = std::exp(0.2 * 0.1);
  cal.d = 1.0 / cal.u;
  cal.h = cal.u;
  cal.l = cal.d;
  cal.q = (1.0 - cal.d) / (cal.u - cal.d);
  cal.p1 = 0.55;
  cal.p4 = 0.45;
  return cal;
}

LatticeCalibration random_calibration(std::mt19937_64& rng) {
  while (true) {
    try {
      return calibrate(testing::random_market(rng), uniform(rng, 0.005, 0.5));
    } catch (const CalibrationInfeasible&) {
    }
  }
}

TEST(GValue, ZeroPayoffHasZeroPrice) {
  const auto cal = calibrate(base_market(0.5), 0.01);
  EXPECT_EQ(g_value({0.0, 0.0}, cal, {1.0}), 0.0);
  EXPECT_EQ(g_value({0.0, 0.0}, cal, {37.0}), 0.0);
}

TEST(GValue, ConstantPayoffIsCash) {
  const auto cal = calibrate(base_market(0.5), 0.01);
  EXPECT_DOUBLE_EQ(g_value({0.5, 0.5}, cal, {1.0}), 0.5);
  EXPECT_DOUBLE_EQ(g_value({-2.0, -2.0}, cal, {3.0}), -2.0);
}

TEST(GValue, CashShiftsThrough) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cal = random_calibration(rng);
    const UtilityParams util{uniform(rng, 0.05, 20.0)};
    const double xh = uniform(rng, -1, 1), xl = uniform(rng, -1, 1), c = uniform(rng, -3, 3);
    EXPECT_NEAR(g_value({xh + c, xl + c}, cal, util), g_value({xh, xl}, cal, util) + c, 1e-10);
  }
}

TEST(GValue, CompleteLatticeIsRiskNeutralExpectation) {
  const auto cal = complete_lattice();
  for (double gamma : {0.01, 1.0, 50.0}) {
    EXPECT_NEAR(g_value({0.3, 0.1}, cal, {gamma}), cal.q * 0.3 + (1 - cal.q) * 0.1, 1e-15);
    EXPECT_NEAR(g_value({-0.2, 0.4}, cal, {gamma}), cal.q * -0.2 + (1 - cal.q) * 0.4, 1e-15);
  }
}

TEST(GValue, MatchesNaiveFormulaInModerateRange) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cal = random_calibration(rng);
    const double gamma = uniform(rng, 0.1, 10.0);
    const double xh = uniform(rng, -1, 1), xl = uniform(rng, -1, 1);
    EXPECT_NEAR(g_value({xh, xl}, cal, {gamma}),
                static_cast<double>(testing::naive_g(xh, xl, cal, gamma)), 1e-13);
  }
}

TEST(GValue, NoOverflowForLargeExponents) {
  const auto cal = calibrate(base_market(0.5), 0.01);
  const double v = g_value({800.0, 0.0}, cal, {10.0});
  ASSERT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 800.0);
  const double w = g_value({-750.0, -760.0}, cal, {1.0});
  ASSERT_TRUE(std::isfinite(w));
  EXPECT_GT(w, -760.0);
  EXPECT_LT(w, -750.0);
}

TEST(GValue, BoundedByGammaLimitsAndMonotone) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cal = random_calibration(rng);
    const double g1 = uniform(rng, 0.1, 5.0);
    const double xh = uniform(rng, -1, 1), xl = uniform(rng, -1, 1);
    const auto lim = gamma_limits({xh, xl}, cal);
    const double v = g_value({xh, xl}, cal, {g1});
    EXPECT_GE(v, lim.high_limit);
    EXPECT_LE(v, lim.low_limit + 1e-15);
    // Increasing in each argument, decreasing in gamma.
    EXPECT_GT(g_value({xh + 0.01, xl}, cal, {g1}), v);
    EXPECT_GT(g_value({xh, xl + 0.01}, cal, {g1}), v);
    if (std::fabs(xh - xl) > 1e-3) EXPECT_LT(g_value({xh, xl}, cal, {2.0 * g1}), v);
  }
}

TEST(GammaLimits, NumericalLimits) {
  const auto cal = calibrate(base_market(0.5), 0.01);
  const PayoffPair pay{0.3, 0.1};
  const auto lim = gamma_limits(pay, cal);
  EXPECT_NEAR(g_value(pay, cal, {1e-8}), lim.low_limit, 1e-6);
  // g - min(x) decays like log(1 / weight on the min payoff) / gamma.
  const PayoffPair small{0.02, 0.005};
  const double gap_bound = -(cal.q * std::log(cal.p2 / (cal.p1 + cal.p2)) +
                             (1 - cal.q) * std::log(cal.p4 / (cal.p3 + cal.p4)));
  for (double gamma : {1e4, 1e5, 1e6}) {
    const double gap = g_value(small, cal, {gamma}) - gamma_limits(small, cal).high_limit;
    EXPECT_GT(gap, 0.0);
    EXPECT_NEAR(gap * gamma, gap_bound, 1e-6);
  }
  EXPECT_NEAR(g_value(small, cal, {1e5}), gamma_limits(small, cal).high_limit, 1e-5);
  const auto eq = gamma_limits({0.7, 0.7}, cal);
  EXPECT_DOUBLE_EQ(eq.low_limit, 0.7);
  EXPECT_DOUBLE_EQ(eq.high_limit, 0.7);
}

TEST(GValue, RejectsBadInputs) {
  const auto cal = calibrate(base_market(0.5), 0.01);
  EXPECT_THROW(g_value({NAN, 0.0}, cal, {1.0}), ConfigError);
  EXPECT_THROW(g_value({0.0, INFINITY}, cal, {1.0}), ConfigError);
  EXPECT_THROW(g_value({0.0, 0.0}, cal, {0.0}), ConfigError);
  EXPECT_THROW(g_value({0.0, 0.0}, cal, {-1.0}), ConfigError);
}

// Closed form and both oracle routes agree on the value frozen from a
// 40-digit Newton solve of the two Merton problems.
TEST(NumericIndifference, BaseParametersOneYearStep) {
  const auto cal = calibrate(base_market(0.5), 1.0);
  const PayoffPair pay{0.3, 0.0};
  const double frozen = 0.09686990919711063522;
  EXPECT_NEAR(numeric_indifference_price(pay, cal, {1.0}, 0.0), frozen, 1e-8);
  EXPECT_NEAR(g_value(pay, cal, {1.0}), frozen, 1e-14);
}

TEST(NumericIndifference, ZeroPayoffAndWealthIndependence) {
  const auto cal = calibrate(base_market(0.5), 0.25);
  EXPECT_NEAR(numeric_indifference_price({0.0, 0.0}, cal, {1.0}, 0.0), 0.0, 1e-9);
  const PayoffPair pay{0.4, -0.1};
  EXPECT_NEAR(numeric_indifference_price(pay, cal, {2.0}, 0.0),
              numeric_indifference_price(pay, cal, {2.0}, 5.0), 1e-8);
}

TEST(NumericIndifference, AgreesWithClosedFormOnRandomDraws) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cal = random_calibration(rng);
    const UtilityParams util{uniform(rng, 0.1, 5.0)};
    const PayoffPair pay{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    EXPECT_NEAR(numeric_indifference_price(pay, cal, util, uniform(rng, -2, 2)),
                g_value(pay, cal, util), 1e-7);
  }
}

TEST(NumericIndifference, ArbitrageLatticeCannotBracket) {
  auto cal = calibrate(base_market(0.5), 0.01);
  cal.p1 += cal.p3;
  cal.p2 += cal.p4;
  cal.p3 = cal.p4 = 0.0;  // the traded asset never falls
  EXPECT_THROW(numeric_indifference_price({0.1, 0.0}, cal, {1.0}, 0.0), BracketFailure);
}

}  // namespace
}  // namespace realopt
