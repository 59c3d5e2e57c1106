#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "realopt/calibration.hpp"
#include "realopt/lattice.hpp"
#include "realopt/valuation.hpp"

namespace realopt {

enum class SweepParam { kRho, kGamma, kSigma2, kDelta, kMaturity };

std::string_view to_string(SweepParam p);
std::optional<SweepParam> parse_sweep_param(std::string_view name);

struct SweepOutputs {
  bool threshold_at_t0 = true;
  bool threshold_curve = false;
  bool value_curve = false;
};

struct SweepSpec {
  SweepParam param = SweepParam::kRho;
  std::vector<double> values;
  SweepOutputs outputs;

  // Throws ConfigError naming the first value outside the parameter's domain.
  void validate() const;
};

// A fully resolved parameter set. The project drift is always consistent
// with `delta` through the CAPM relation unless `mu2_given`, in which case
// `delta` is derived from it.
struct ResolvedConfig {
  MarketParams market;
  double delta = 0.04;
  bool mu2_given = false;
  OptionSpec option;
  GridControls grid;
  std::optional<SweepSpec> sweep;

  // Stable JSON rendering of every resolved field.
  std::string canonical_json() const;
  // FNV-1a 64 of canonical_json().
  std::uint64_t hash() const;

  // Copy with one parameter replaced; rho/sigma2/delta re-derive mu2 so the
  // shortfall stays fixed.
  ResolvedConfig with(SweepParam p, double value) const;
};

// Base parameters with the given correlation and risk aversion.
ResolvedConfig base_config(double rho, double gamma);

// JSON document -> resolved configuration. Throws ConfigError with
// field-qualified messages.
ResolvedConfig parse_config(std::string_view text);
ResolvedConfig load_config(const std::string& path);

struct RunResult {
  std::string swept_name;
  double swept_value = 0.0;
  ResolvedConfig config;
  double dt = 0.0;
  int half_height = 0;
  int n_steps = 0;
  std::optional<double> threshold_spot_t0;
  double option_value_v0 = 0.0;
  std::string anomaly_flags;  // '|'-separated; empty when clean
  double wall_ms = 0.0;
  std::optional<ThresholdCurve> threshold_curve;
  std::vector<ValuePoint> value_curve;
  bool failed = false;
};

// Single lattice run for an already-resolved configuration. Errors are
// recorded in the result rather than thrown.
RunResult run_point(const ResolvedConfig& config, const SweepOutputs& outputs,
                    std::string swept_name = "none", double swept_value = 0.0);

// One run per swept value, in the order given, on up to `workers` threads.
std::vector<RunResult> run_sweep(const ResolvedConfig& base, const SweepSpec& spec,
                                 int workers = 1);

struct PresetSeries {
  ResolvedConfig base;
  SweepSpec sweep;
};

// Built-in sweeps for the figures: fig1-left, fig1-right, fig2-left,
// fig2-right, fig3, fig4. Throws ConfigError for unknown names.
std::vector<PresetSeries> make_preset(std::string_view name, const ResolvedConfig& base);
const std::vector<std::string>& preset_names();

std::vector<RunResult> run_preset(const std::vector<PresetSeries>& preset, int workers = 1);

// CSV output. Every file starts with "# config_hash=<hex>" followed by the
// column header. Numbers use 17 significant digits.
std::string format_sweep_csv(const std::vector<RunResult>& results, std::uint64_t config_hash,
                             bool include_timing = true);
std::string format_threshold_csv(const ThresholdCurve& curve, std::uint64_t config_hash);
std::string format_value_curve_csv(const std::vector<ValuePoint>& curve,
                                   std::uint64_t config_hash);

// Writes `contents` to `path`; throws IoError with the path on failure.
void write_file(const std::string& path, const std::string& contents);

inline void write_csv(const std::vector<RunResult>& results, const std::string& path,
                      std::uint64_t config_hash, bool include_timing = true) {
  write_file(path, format_sweep_csv(results, config_hash, include_timing));
}

struct CsvTable {
  std::string comment;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text);

std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace realopt
