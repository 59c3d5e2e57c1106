#include "realopt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "realopt/errors.hpp"
#include "realopt/indifference.hpp"

namespace realopt {

void OptionSpec::validate() const {
  if (!(std::isfinite(cost) && cost > 0.0)) throw ConfigError("cost: must be > 0");
  if (!std::isfinite(cost_growth)) throw ConfigError("cost_growth: must be finite");
  if (!(std::isfinite(maturity) && maturity > 0.0)) throw ConfigError("maturity: must be > 0");
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw ConfigError("gamma: must be > 0");
}

double OptionSpec::discounted_cost(double t, double r) const {
  return std::exp((cost_growth - r) * t) * cost;
}

int choose_half_height(const MarketParams& market, const OptionSpec& spec, double dt,
                       bool full_coverage) {
  const double T = spec.maturity;
  const double drift = std::fabs(market.mu2 - market.r - 0.5 * market.sigma2 * market.sigma2) * T;
  const double spread = 4.0 * market.sigma2 * std::sqrt(T);
  const double cell = market.sigma2 * std::sqrt(dt);
  int m = static_cast<int>(std::ceil((drift + spread) / cell));
  if (full_coverage) {
    m = std::max(m, static_cast<int>(std::llround(T / dt)));
  }
  return std::max(m, 1);
}

GridSpec build_grid(const LatticeCalibration& cal, double v0, double r, int n_steps,
                    int half_height) {
  if (n_steps < 1) throw ConfigError("n_steps: must be >= 1");
  if (half_height < 1) throw ConfigError("half_height: must be >= 1");
  if (!(cal.h > 1.0)) throw CalibrationInfeasible("project up-move h must exceed 1");
  GridSpec grid;
  grid.n_steps = n_steps;
  grid.half_height = half_height;
  grid.dt = cal.dt;
  grid.h = cal.h;
  grid.v0 = v0;
  grid.r = r;
  grid.rows.resize(2 * static_cast<std::size_t>(half_height) + 1);
  // Powers per row rather than running products keep the ladder exactly
  // symmetric and the centre exactly v0.
  for (std::size_t k = 0; k < grid.rows.size(); ++k) {
    const int power = half_height - static_cast<int>(k);
    grid.rows[k] = power == 0 ? v0 : v0 * std::pow(cal.h, power);
  }
  return grid;
}

GridSpec build_grid(const MarketParams& market, const OptionSpec& spec, int n_steps,
                    int half_height) {
  spec.validate();
  if (n_steps < 1) throw ConfigError("n_steps: must be >= 1");
  const LatticeCalibration cal = calibrate(market, spec.maturity / n_steps);
  return build_grid(cal, market.v0, market.r, n_steps, half_height);
}

ValueGrid::ValueGrid(std::size_t rows, int n_steps, bool retain_full)
    : rows_(rows),
      n_steps_(n_steps),
      retain_full_(retain_full),
      values_(rows * (retain_full ? static_cast<std::size_t>(n_steps) + 1 : 1), 0.0),
      mask_(rows * (static_cast<std::size_t>(n_steps) + 1), 0),
      cost_(static_cast<std::size_t>(n_steps) + 1, 0.0) {}

bool ValueGrid::has_column(int n) const {
  if (n < 0 || n > n_steps_) return false;
  return retain_full_ || n == 0;
}

double* ValueGrid::column(int n) {
  return values_.data() + (retain_full_ ? static_cast<std::size_t>(n) * rows_ : 0);
}

double ValueGrid::value(std::size_t row, int n) const {
  if (!has_column(n) || row >= rows_) {
    throw std::out_of_range("value grid: node (" + std::to_string(row) + ", " +
                            std::to_string(n) + ") not available");
  }
  return values_[(retain_full_ ? static_cast<std::size_t>(n) * rows_ : 0) + row];
}

ValueGrid backward_induce(const GridSpec& grid, const LatticeCalibration& cal,
                          const OptionSpec& spec, InductionOptions options) {
  spec.validate();
  if (grid.rows.size() < 3) throw ConfigError("grid: need at least three rows");
  if (std::fabs(grid.h - cal.h) > 1e-12 * cal.h) {
    throw ConfigError("grid: ladder was built for a different calibration");
  }

  const std::size_t rows = grid.rows.size();
  const int N = grid.n_steps;
  const std::size_t bottom = rows - 1;
  ValueGrid vg(rows, N, options.retain_full);

  for (int n = 0; n <= N; ++n) {
    vg.cost_[static_cast<std::size_t>(n)] = spec.discounted_cost(grid.time(n), grid.r);
  }
  for (int n = 0; n < N; ++n) {
    if (grid.rows[0] - vg.cost_at(n) < 0.0) {
      throw ConfigError("grid: top boundary value negative at n=" + std::to_string(n) +
                        "; half_height too small");
    }
  }

  const IndifferenceKernel kernel(cal, UtilityParams{spec.gamma});
  const bool linear = options.rule == ContinuationRule::kRiskNeutralIdiosyncratic;

  std::vector<double> next(rows);
  std::vector<double> cur(rows);

  {
    const double k_T = vg.cost_at(N);
    std::uint8_t* mask = vg.mask_.data() + static_cast<std::size_t>(N) * rows;
    for (std::size_t k = 0; k < rows; ++k) {
      const double payoff = grid.rows[k] - k_T;
      next[k] = payoff > 0.0 ? payoff : 0.0;
      mask[k] = payoff > 0.0;
    }
    if (options.retain_full || N == 0) std::copy(next.begin(), next.end(), vg.column(N));
  }

  for (int n = N - 1; n >= 0; --n) {
    const double k_n = vg.cost_at(n);
    std::uint8_t* mask = vg.mask_.data() + static_cast<std::size_t>(n) * rows;

    cur[0] = grid.rows[0] - k_n;
    mask[0] = 1;
    cur[bottom] = 0.0;
    mask[bottom] = 0;

    for (std::size_t k = 1; k < bottom; ++k) {
      // Row k-1 is the project-up successor.
      const double cont =
          linear ? kernel.risk_neutral_limit(next[k - 1], next[k + 1]) : kernel(next[k - 1], next[k + 1]);
      const double payoff = grid.rows[k] - k_n;
      if (payoff > 0.0 && payoff >= cont) {
        cur[k] = payoff;
        mask[k] = 1;
      } else {
        cur[k] = std::max(cont, 0.0);
        mask[k] = 0;
      }
    }
    if (options.retain_full || n == 0) std::copy(cur.begin(), cur.end(), vg.column(n));
    next.swap(cur);
  }
  return vg;
}

bool ThresholdCurve::any_anomalous() const {
  return std::any_of(points.begin(), points.end(), [](const ThresholdPoint& p) { return p.anomalous; });
}

ThresholdCurve extract_thresholds(const ValueGrid& vg, const GridSpec& grid,
                                  const OptionSpec& spec) {
  const std::size_t rows = vg.rows();
  const int N = vg.n_steps();
  ThresholdCurve curve;
  curve.points.reserve(static_cast<std::size_t>(N) + 1);

  for (int n = 0; n <= N; ++n) {
    ThresholdPoint pt;
    pt.n = n;
    pt.t = grid.time(n);
    pt.time_to_maturity = std::max(spec.maturity - pt.t, 0.0);

    std::size_t first_hold = 0;
    while (first_hold < rows && vg.exercise(first_hold, n)) ++first_hold;
    // Before maturity the top row exercises by construction, not by choice.
    const std::size_t min_region = n < N ? 2 : 1;
    if (first_hold >= min_region) {
      const double v_star = grid.rows[first_hold - 1];
      pt.discounted = v_star;
      pt.spot = std::exp(grid.r * pt.t) * v_star;
      pt.resolution_halfwidth = v_star * (grid.h - 1.0);
    }
    for (std::size_t k = first_hold; k < rows; ++k) {
      if (vg.exercise(k, n)) {
        pt.anomalous = true;
        break;
      }
    }
    curve.points.push_back(pt);
  }
  return curve;
}

std::vector<ValuePoint> value_curve(const ValueGrid& vg, const GridSpec& grid, int n) {
  if (!vg.has_column(n)) {
    throw std::out_of_range("value curve: column " + std::to_string(n) + " not available");
  }
  const double growth = std::exp(grid.r * grid.time(n));
  const double cost = vg.cost_at(n);
  std::vector<ValuePoint> out;
  out.reserve(vg.rows());
  for (std::size_t k = 0; k < vg.rows(); ++k) {
    ValuePoint p;
    p.v_spot = growth * grid.rows[k];
    p.option_value = growth * vg.value(k, n);
    p.exercise_value = growth * std::max(grid.rows[k] - cost, 0.0);
    out.push_back(p);
  }
  return out;
}

}  // namespace realopt
