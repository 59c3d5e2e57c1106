#include "realopt/reference.hpp"

#include <cmath>

#include "realopt/errors.hpp"

namespace realopt {

double perpetual_beta(const PerpetualParams& p) {
  if (!(p.delta > 0.0)) throw DivergentThreshold("perpetual threshold diverges for delta <= 0");
  if (!(p.sigma > 0.0)) throw ConfigError("sigma: must be > 0");
  if (!(p.r > 0.0)) throw ConfigError("r: must be > 0");
  const double a = 0.5 * p.sigma * p.sigma;
  const double b = p.r - p.delta - a;
  const double c = -p.r;
  const double root = std::sqrt(b * b - 4.0 * a * c);
  // c < 0, so the roots straddle zero; pick the cancellation-free form.
  return b <= 0.0 ? (-b + root) / (2.0 * a) : (2.0 * -c) / (b + root);
}

double perpetual_threshold(const PerpetualParams& p) {
  if (!(p.cost > 0.0)) throw ConfigError("cost: must be > 0");
  const double beta = perpetual_beta(p);
  return beta / (beta - 1.0) * p.cost;
}

ThresholdCurve risk_neutral_idiosyncratic_limit(const MarketParams& market,
                                                const OptionSpec& spec,
                                                const GridControls& controls) {
  OptionSpec limit = spec;
  limit.gamma = 1e-4;
  InductionOptions opts;
  opts.rule = ContinuationRule::kRiskNeutralIdiosyncratic;
  return value_option(market, limit, controls, opts).thresholds;
}

}  // namespace realopt
