#pragma once

#include "realopt/calibration.hpp"
#include "realopt/lattice.hpp"
#include "realopt/valuation.hpp"

namespace realopt {

struct PerpetualParams {
  double sigma = 0.2;
  double r = 0.04;
  double delta = 0.04;
  double cost = 1.0;
};

// Root of 0.5 sigma^2 b (b - 1) + (r - delta) b - r = 0 that exceeds one.
double perpetual_beta(const PerpetualParams& p);

// Complete-market perpetual investment threshold beta / (beta - 1) * I.
// Throws DivergentThreshold when delta <= 0.
double perpetual_threshold(const PerpetualParams& p);

inline double npv_threshold(double cost) { return cost; }

// Lattice thresholds with the continuation value replaced by the gamma -> 0
// limit of the indifference price: hedgeable risk priced, idiosyncratic risk
// valued risk-neutrally.
ThresholdCurve risk_neutral_idiosyncratic_limit(const MarketParams& market,
                                                const OptionSpec& spec,
                                                const GridControls& controls);

}  // namespace realopt
