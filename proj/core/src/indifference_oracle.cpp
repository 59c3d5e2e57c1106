// Indifference price straight from the expected-utility definitions. Shares
// nothing with the closed-form kernel except the calibration struct.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "realopt/errors.hpp"
#include "realopt/indifference.hpp"

namespace realopt {

namespace {

constexpr int kMaxExpansions = 200;
constexpr double kHedgeTol = 1e-12;
constexpr double kPriceTol = 1e-10;

struct OneStepMarket {
  std::array<double, 4> prob;
  std::array<double, 4> gain;  // S_T - S_0 per unit held
};

// log(-E[U(wealth + H * gain + claim)]); minimizing it maximizes expected utility.
double log_disutility(const OneStepMarket& m, const std::array<double, 4>& claim, double gamma,
                      double wealth, double hedge) {
  std::array<double, 4> expo{};
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    expo[k] = -gamma * (wealth + hedge * m.gain[k] + claim[k]);
    if (m.prob[k] > 0.0) top = std::max(top, expo[k]);
  }
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (m.prob[k] > 0.0) sum += m.prob[k] * std::exp(expo[k] - top);
  }
  return top + std::log(sum);
}

// min over H of log_disutility by golden-section search.
double optimal_log_disutility(const OneStepMarket& m, const std::array<double, 4>& claim,
                              double gamma, double wealth, double scale) {
  auto f = [&](double hedge) { return log_disutility(m, claim, gamma, wealth, hedge); };

  // The objective is strictly convex in H. Widen [-s, s] until both ends are
  // worse than H = 0, which puts the minimizer strictly inside.
  const double f0 = f(0.0);
  double lo = -scale;
  double hi = scale;
  int expansions = 0;
  while (f(lo) <= f0 && expansions < kMaxExpansions) {
    lo *= 2.0;
    ++expansions;
  }
  while (f(hi) <= f0 && expansions < kMaxExpansions) {
    hi *= 2.0;
    ++expansions;
  }
  if (expansions >= kMaxExpansions || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw BracketFailure("could not bracket the optimal hedge; calibration admits arbitrage?");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kHedgeTol * std::max(1.0, std::fabs(c))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(0.5 * (a + b))});
}

}  // namespace

double numeric_indifference_price(PayoffPair pay, const LatticeCalibration& cal,
                                  UtilityParams util, double x0, double s0) {
  if (!(util.gamma > 0.0) || !std::isfinite(pay.x_h) || !std::isfinite(pay.x_l) ||
      !std::isfinite(x0) || !(s0 > 0.0)) {
    throw ConfigError("numeric_indifference_price: invalid inputs");
  }
  if (!(cal.u > cal.d)) {
    throw BracketFailure("degenerate traded asset: u <= d");
  }
  const OneStepMarket m{{cal.p1, cal.p2, cal.p3, cal.p4},
                        {(cal.u - 1.0) * s0, (cal.u - 1.0) * s0, (cal.d - 1.0) * s0,
                         (cal.d - 1.0) * s0}};
  const std::array<double, 4> none{0.0, 0.0, 0.0, 0.0};
  const std::array<double, 4> claim{pay.x_h, pay.x_l, pay.x_h, pay.x_l};
  const double scale = std::max({1.0, std::fabs(pay.x_h), std::fabs(pay.x_l)}) /
                       (util.gamma * s0 * (cal.u - cal.d));

  const double without = optimal_log_disutility(m, none, util.gamma, x0, scale);
  // Positive when paying `price` for the claim leaves the investor worse off.
  auto excess = [&](double price) {
    return optimal_log_disutility(m, claim, util.gamma, x0 - price, scale) - without;
  };

  double lo = std::min(pay.x_h, pay.x_l) - 1.0;
  double hi = std::max(pay.x_h, pay.x_l) + 1.0;
  int expansions = 0;
  while (excess(lo) > 0.0 && expansions++ < kMaxExpansions) lo -= (hi - lo);
  while (excess(hi) < 0.0 && expansions++ < kMaxExpansions) hi += (hi - lo);
  if (expansions >= kMaxExpansions) {
    throw BracketFailure("could not bracket the indifference price");
  }
  while (hi - lo > kPriceTol) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace realopt
