#pragma once

// Test-only reference computations. Nothing here calls into the lattice or
// the closed-form kernel.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "realopt/calibration.hpp"
#include "realopt/lattice.hpp"

namespace realopt::testing {

// g written out literally, no shifting, in long double.
inline long double naive_g(long double x_h, long double x_l, const LatticeCalibration& cal,
                           long double gamma) {
  const long double p1 = cal.p1, p2 = cal.p2, p3 = cal.p3, p4 = cal.p4;
  const long double q = (1.0L - static_cast<long double>(cal.d)) /
                        (static_cast<long double>(cal.u) - static_cast<long double>(cal.d));
  const long double up = std::log((p1 + p2) / (p1 * std::exp(-gamma * x_h) + p2 * std::exp(-gamma * x_l)));
  const long double dn = std::log((p3 + p4) / (p3 * std::exp(-gamma * x_h) + p4 * std::exp(-gamma * x_l)));
  return q / gamma * up + (1.0L - q) / gamma * dn;
}

// Exhaustive (non-memoized) evaluation of the early-exercise recursion on the
// (2M+1)-row ladder, following every path from (row, n) to maturity.
class BruteForceLattice {
 public:
  BruteForceLattice(const LatticeCalibration& cal, const OptionSpec& spec, double v0, double r,
                    int n_steps, int half_height)
      : cal_(cal), spec_(spec), n_steps_(n_steps), half_height_(half_height) {
    const long double h = static_cast<long double>(cal.h);
    for (int k = 0; k <= 2 * half_height; ++k) {
      rows_.push_back(static_cast<long double>(v0) * std::pow(h, half_height - k));
    }
    for (int n = 0; n <= n_steps; ++n) {
      const long double t = static_cast<long double>(spec.maturity) * n / n_steps;
      cost_.push_back(std::exp((static_cast<long double>(spec.cost_growth) - r) * t) *
                      static_cast<long double>(spec.cost));
    }
  }

  long double value(int row, int n) const {
    const long double payoff = rows_[row] - cost_[n];
    if (n == n_steps_) return payoff > 0 ? payoff : 0.0L;
    if (row == 0) return payoff;
    if (row == 2 * half_height_) return 0.0L;
    const long double cont =
        naive_g(value(row - 1, n + 1), value(row + 1, n + 1), cal_, spec_.gamma);
    return std::max(payoff > 0 ? payoff : 0.0L, cont);
  }

 private:
  LatticeCalibration cal_;
  OptionSpec spec_;
  int n_steps_;
  int half_height_;
  std::vector<long double> rows_;
  std::vector<long double> cost_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random market with CAPM-consistent drift for a random shortfall.
inline MarketParams random_market(std::mt19937_64& rng) {
  MarketParams m;
  m.mu1 = uniform(rng, 0.02, 0.15);
  m.sigma1 = uniform(rng, 0.15, 0.4);
  m.sigma2 = uniform(rng, 0.1, 0.4);
  m.rho = uniform(rng, -0.8, 0.8);
  m.r = uniform(rng, 0.0, 0.06);
  m.s0 = uniform(rng, 0.5, 2.0);
  m.v0 = uniform(rng, 0.8, 1.3);
  m.mu2 = mu2_from_shortfall(m, uniform(rng, 0.0, 0.08));
  return m;
}

inline MarketParams base_market(double rho, double delta = 0.04) {
  MarketParams m;
  m.rho = rho;
  m.mu2 = mu2_from_shortfall(m, delta);
  return m;
}

}  // namespace realopt::testing
