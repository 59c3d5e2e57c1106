#pragma once

#include "realopt/calibration.hpp"

namespace realopt {

// Exponential utility U(x) = -exp(-gamma x) on discounted wealth.
struct UtilityParams {
  double gamma = 1.0;
};

// Discounted claim payoffs in the project-up (states 1, 3) and
// project-down (states 2, 4) states.
struct PayoffPair {
  double x_h = 0.0;
  double x_l = 0.0;
};

// One-period exponential indifference price with the calibration folded into
// conditional weights. Accepts degenerate calibrations (p2 = p3 = 0 and the
// like) as long as each traded-asset branch has positive mass.
class IndifferenceKernel {
 public:
  IndifferenceKernel(const LatticeCalibration& cal, UtilityParams util);

  // Evaluated as min(x_h, x_l) minus a shifted log-sum-exp per branch, so
  // arbitrarily large gamma * |x| neither overflows nor cancels.
  double operator()(double x_h, double x_l) const;

  // gamma -> 0 limit: q E[x | S up] + (1 - q) E[x | S down].
  double risk_neutral_limit(double x_h, double x_l) const {
    return q_ * (up_h_ * x_h + up_l_ * x_l) + (1.0 - q_) * (dn_h_ * x_h + dn_l_ * x_l);
  }

  double gamma() const { return gamma_; }

 private:
  double q_;
  double gamma_;
  // Conditional probabilities of project up/down given the traded-asset move.
  double up_h_, up_l_;
  double dn_h_, dn_l_;
};

// Closed-form indifference value g(x_h, x_l). Throws ConfigError on
// non-finite payoffs or gamma <= 0.
double g_value(PayoffPair pay, const LatticeCalibration& cal, UtilityParams util);

struct GammaLimits {
  double low_limit = 0.0;   // gamma -> 0
  double high_limit = 0.0;  // gamma -> infinity: min(x_h, x_l)
};

GammaLimits gamma_limits(PayoffPair pay, const LatticeCalibration& cal);

// Recomputes the indifference price from its definition: two Merton
// problems solved by golden-section search over the hedge H, then the
// indifference equation solved by bisection on the price. Independent of
// the closed form above; used as an oracle.
double numeric_indifference_price(PayoffPair pay, const LatticeCalibration& cal,
                                  UtilityParams util, double x0, double s0 = 1.0);

}  // namespace realopt
