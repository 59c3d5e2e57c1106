#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "realopt/calibration.hpp"

namespace realopt {

// Option to pay `cost` (growing at `cost_growth`) for the project, any time up to `maturity`.
struct OptionSpec {
  double cost = 1.0;
  double cost_growth = 0.0;
  double maturity = 10.0;
  double gamma = 1.0;

  void validate() const;

  // Exercise cost at time t in numeraire units: exp((alpha - r) t) * I.
  double discounted_cost(double t, double r) const;
};

// Project-value ladder. Row k (0-based) holds h^(M - k) * v0, so row 0 is the
// top boundary, row M is v0 and row 2M is the bottom boundary.
struct GridSpec {
  int n_steps = 0;
  int half_height = 0;
  double dt = 0.0;
  double h = 0.0;
  double v0 = 0.0;
  double r = 0.0;
  std::vector<double> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t center_row() const { return static_cast<std::size_t>(half_height); }
  double time(int n) const { return n * dt; }
  double maturity() const { return n_steps * dt; }
};

// Rows needed so the ladder spans the mean log-drift plus four standard
// deviations over the life of the option. With `full_coverage` the result is
// raised to at least N, so no path ever reaches a boundary row.
int choose_half_height(const MarketParams& market, const OptionSpec& spec, double dt,
                       bool full_coverage = false);

// Calibrates at dt = T / n_steps and lays out the ladder.
GridSpec build_grid(const MarketParams& market, const OptionSpec& spec, int n_steps,
                    int half_height);

// Ladder for an externally supplied (possibly degenerate) calibration.
GridSpec build_grid(const LatticeCalibration& cal, double v0, double r, int n_steps,
                    int half_height);

enum class ContinuationRule {
  kIndifference,              // exponential-utility g
  kRiskNeutralIdiosyncratic,  // gamma -> 0 linear limit of g
};

struct InductionOptions {
  ContinuationRule rule = ContinuationRule::kIndifference;
  // Keep every value column; otherwise only n = 0 survives the sweep.
  bool retain_full = false;
};

// Discounted option values plus the exercise decision at every node.
class ValueGrid {
 public:
  ValueGrid(std::size_t rows, int n_steps, bool retain_full);

  std::size_t rows() const { return rows_; }
  int n_steps() const { return n_steps_; }
  bool has_column(int n) const;

  // Throws std::out_of_range if the column was not retained.
  double value(std::size_t row, int n) const;
  bool exercise(std::size_t row, int n) const {
    return mask_[static_cast<std::size_t>(n) * rows_ + row] != 0;
  }
  // Discounted exercise cost at time index n.
  double cost_at(int n) const { return cost_[static_cast<std::size_t>(n)]; }

 private:
  friend ValueGrid backward_induce(const GridSpec&, const LatticeCalibration&, const OptionSpec&,
                                   InductionOptions);

  double* column(int n);

  std::size_t rows_;
  int n_steps_;
  bool retain_full_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> cost_;
};

// Terminal payoff, exercised top row, worthless bottom row and the
// early-exercise recursion max{(V - K_n)^+, g(C_up, C_down)} in between.
// A node exercises when its payoff is positive and at least the continuation
// value. Throws ConfigError if the top boundary value is negative.
ValueGrid backward_induce(const GridSpec& grid, const LatticeCalibration& cal,
                          const OptionSpec& spec, InductionOptions options = {});

struct ThresholdPoint {
  int n = 0;
  double t = 0.0;
  double time_to_maturity = 0.0;
  // Lowest row of the contiguous exercise region hanging from the top row;
  // empty when no interior node exercises.
  std::optional<double> discounted;
  std::optional<double> spot;
  double resolution_halfwidth = 0.0;
  // Exercise nodes found below a holding node (region not an up-set in V).
  bool anomalous = false;
};

struct ThresholdCurve {
  std::vector<ThresholdPoint> points;

  const ThresholdPoint& at_t0() const { return points.front(); }
  bool any_anomalous() const;
};

ThresholdCurve extract_thresholds(const ValueGrid& vg, const GridSpec& grid,
                                  const OptionSpec& spec);

struct ValuePoint {
  double v_spot = 0.0;
  double option_value = 0.0;    // spot units at t_n
  double exercise_value = 0.0;  // (V - K)^+ in spot units at t_n
};

// Column n, top row first. Throws std::out_of_range for unknown or dropped columns.
std::vector<ValuePoint> value_curve(const ValueGrid& vg, const GridSpec& grid, int n);

}  // namespace realopt
