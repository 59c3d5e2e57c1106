#include "realopt/valuation.hpp"

#include <cmath>
#include <utility>

#include "realopt/errors.hpp"

namespace realopt {

int steps_for(double maturity, double dt) {
  if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("dt: must be > 0");
  const double steps = std::round(maturity / dt);
  if (steps < 1.0 || steps > 1e8) throw ConfigError("dt: yields an unusable step count");
  return static_cast<int>(steps);
}

Valuation value_option(const MarketParams& market, const OptionSpec& spec,
                       const GridControls& controls, InductionOptions options) {
  spec.validate();
  market.validate();
  const int n_steps = steps_for(spec.maturity, controls.dt);
  const double dt = spec.maturity / n_steps;
  const int m = controls.m_override ? *controls.m_override
                                    : choose_half_height(market, spec, dt, controls.full_coverage);

  LatticeCalibration cal = calibrate(market, dt);
  GridSpec grid = build_grid(cal, market.v0, market.r, n_steps, m);
  ValueGrid vg = backward_induce(grid, cal, spec, options);
  ThresholdCurve curve = extract_thresholds(vg, grid, spec);
  return Valuation{cal, std::move(grid), std::move(vg), std::move(curve)};
}

}  // namespace realopt
