#include "realopt/indifference.hpp"

#include <cmath>
#include <string>

#include "realopt/errors.hpp"

namespace realopt {

namespace {

// log(w_min + w_max * exp(-z)) for z >= 0 and w_min + w_max = 1, where
// w_min weighs the smaller payoff (exponent shifted to zero).
double shifted_log_sum(double w_min, double w_max, double z) {
  if (w_max == 0.0) return 0.0;
  if (w_min == 0.0) return -z;
  if (z < 1.0) return std::log1p(w_max * std::expm1(-z));
  return std::log(w_min + w_max * std::exp(-z));
}

}  // namespace

IndifferenceKernel::IndifferenceKernel(const LatticeCalibration& cal, UtilityParams util)
    : q_(cal.q), gamma_(util.gamma) {
  if (!(std::isfinite(util.gamma) && util.gamma > 0.0)) {
    throw ConfigError("gamma: must be > 0 and finite");
  }
  const double up = cal.p1 + cal.p2;
  const double dn = cal.p3 + cal.p4;
  if (!(up > 0.0 && dn > 0.0) || cal.p1 < 0.0 || cal.p2 < 0.0 || cal.p3 < 0.0 || cal.p4 < 0.0) {
    throw CalibrationInfeasible("indifference kernel needs nonnegative p with mass on both branches");
  }
  up_h_ = cal.p1 / up;
  up_l_ = cal.p2 / up;
  dn_h_ = cal.p3 / dn;
  dn_l_ = cal.p4 / dn;
}

double IndifferenceKernel::operator()(double x_h, double x_l) const {
  double lse_up;
  double lse_dn;
  double floor;
  if (x_h >= x_l) {
    floor = x_l;
    const double z = gamma_ * (x_h - x_l);
    lse_up = shifted_log_sum(up_l_, up_h_, z);
    lse_dn = shifted_log_sum(dn_l_, dn_h_, z);
  } else {
    floor = x_h;
    const double z = gamma_ * (x_l - x_h);
    lse_up = shifted_log_sum(up_h_, up_l_, z);
    lse_dn = shifted_log_sum(dn_h_, dn_l_, z);
  }
  return floor - (q_ * lse_up + (1.0 - q_) * lse_dn) / gamma_;
}

double g_value(PayoffPair pay, const LatticeCalibration& cal, UtilityParams util) {
  if (!std::isfinite(pay.x_h) || !std::isfinite(pay.x_l)) {
    throw ConfigError("payoff: must be finite");
  }
  return IndifferenceKernel(cal, util)(pay.x_h, pay.x_l);
}

GammaLimits gamma_limits(PayoffPair pay, const LatticeCalibration& cal) {
  const double up = cal.p1 + cal.p2;
  const double dn = cal.p3 + cal.p4;
  GammaLimits lim;
  lim.low_limit = cal.q * (cal.p1 * pay.x_h + cal.p2 * pay.x_l) / up +
                  (1.0 - cal.q) * (cal.p3 * pay.x_h + cal.p4 * pay.x_l) / dn;
  lim.high_limit = std::fmin(pay.x_h, pay.x_l);
  return lim;
}

}  // namespace realopt
