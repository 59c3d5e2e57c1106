#pragma once

#include <optional>

#include "realopt/calibration.hpp"
#include "realopt/lattice.hpp"

namespace realopt {

struct GridControls {
  double dt = 1.0 / 900.0;
  std::optional<int> m_override;
  bool full_coverage = false;
};

// Everything one lattice run produces.
struct Valuation {
  LatticeCalibration calibration;
  GridSpec grid;
  ValueGrid values;
  ThresholdCurve thresholds;

  double value_at_v0() const { return values.value(grid.center_row(), 0); }
};

// N = round(T / dt) steps (dt is then snapped to T / N), M from
// choose_half_height unless overridden.
Valuation value_option(const MarketParams& market, const OptionSpec& spec,
                       const GridControls& controls, InductionOptions options = {});

// Step count used by value_option for a requested dt.
int steps_for(double maturity, double dt);

}  // namespace realopt
