// realopt: finite-horizon real options priced by exponential-utility indifference.
//
//   realopt price     --config cfg.json
//   realopt threshold --config cfg.json --out curve.csv
//   realopt sweep     --preset fig1-left --out fig1.csv --workers 4
//   realopt validate  --config cfg.json
//
// Exit codes: 0 ok, 2 config error, 3 infeasible calibration, 4 I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "realopt/calibration.hpp"
#include "realopt/errors.hpp"
#include "realopt/experiments.hpp"
#include "realopt/valuation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<double> dt;
  int workers = 1;
  std::string preset;
  bool no_timing = false;
};

realopt::ResolvedConfig resolve(const Options& opt, bool config_required) {
  realopt::ResolvedConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = realopt::load_config(opt.config_path);
  } else if (config_required) {
    throw realopt::ConfigError("--config is required for this command");
  } else {
    cfg = realopt::base_config(0.5, 1.0);
  }
  if (opt.dt) {
    if (!(*opt.dt > 0.0)) throw realopt::ConfigError("--dt: must be > 0");
    cfg.grid.dt = *opt.dt;
  }
  return cfg;
}

void emit(const Options& opt, const std::string& contents) {
  if (opt.out_path.empty()) {
    std::cout << contents;
  } else {
    realopt::write_file(opt.out_path, contents);
  }
}

std::string fmt(double x) { return realopt::format_double(x); }

int cmd_price(const Options& opt) {
  const auto cfg = resolve(opt, true);
  const auto v = realopt::value_option(cfg.market, cfg.option, cfg.grid);
  const auto& t0 = v.thresholds.at_t0();
  std::cout << "option_value_v0 " << fmt(v.value_at_v0()) << '\n'
            << "threshold_spot_t0 " << (t0.spot ? fmt(*t0.spot) : "none") << '\n'
            << "resolution_halfwidth " << fmt(t0.resolution_halfwidth) << '\n'
            << "grid " << v.grid.row_count() << "x" << (v.grid.n_steps + 1) << " (M=" << v.grid.half_height
            << ", N=" << v.grid.n_steps << ", dt=" << fmt(v.grid.dt) << ")\n";
  if (v.thresholds.any_anomalous()) std::cout << "warning: exercise region not an up-set in V\n";
  return kExitOk;
}

int cmd_threshold(const Options& opt) {
  const auto cfg = resolve(opt, true);
  const auto v = realopt::value_option(cfg.market, cfg.option, cfg.grid);
  emit(opt, realopt::format_threshold_csv(v.thresholds, cfg.hash()));
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  const auto cfg = resolve(opt, true);
  const int n = realopt::steps_for(cfg.option.maturity, cfg.grid.dt);
  const auto cal = realopt::calibrate(cfg.market, cfg.option.maturity / n);
  const auto rep = realopt::verify_moments(cal, cfg.market);
  std::cout << "mu2 " << fmt(cfg.market.mu2) << "\ndelta " << fmt(cfg.delta) << "\nmu2_equilibrium "
            << fmt(realopt::capm_equilibrium_rate(cfg.market)) << "\ndt " << fmt(cal.dt) << "\nu "
            << fmt(cal.u) << "\nd " << fmt(cal.d) << "\nh " << fmt(cal.h) << "\nl " << fmt(cal.l)
            << "\nq " << fmt(cal.q) << "\np " << fmt(cal.p1) << ' ' << fmt(cal.p2) << ' '
            << fmt(cal.p3) << ' ' << fmt(cal.p4) << "\nmean_s_error " << fmt(rep.mean_s_error())
            << "\nmean_v_error " << fmt(rep.mean_v_error()) << "\ncov_error "
            << fmt(rep.cov_error()) << "\nvar_s " << fmt(rep.var_s) << " target "
            << fmt(rep.target_var_s) << "\nvar_v " << fmt(rep.var_v) << " target "
            << fmt(rep.target_var_v) << '\n';
  return kExitOk;
}

// Value curves for a preset go next to the main CSV as <stem>.value<k>.csv.
std::string sidecar_path(const std::string& out, std::size_t index) {
  std::filesystem::path p(out.empty() ? "sweep.csv" : out);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + ".value" + std::to_string(index) + ".csv")).string();
}

int cmd_sweep(const Options& opt) {
  const bool has_preset = !opt.preset.empty();
  auto cfg = resolve(opt, !has_preset);
  std::vector<realopt::RunResult> results;
  std::uint64_t hash;
  if (has_preset) {
    const auto preset = realopt::make_preset(opt.preset, cfg);
    results = realopt::run_preset(preset, opt.workers);
    hash = realopt::fnv1a64(cfg.canonical_json() + "|preset=" + opt.preset);
  } else {
    if (!cfg.sweep) throw realopt::ConfigError("sweep: config has no sweep section and no --preset");
    results = realopt::run_sweep(cfg, *cfg.sweep, opt.workers);
    hash = cfg.hash();
  }
  emit(opt, realopt::format_sweep_csv(results, hash, !opt.no_timing));

  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    if (!r.value_curve.empty()) {
      realopt::write_file(sidecar_path(opt.out_path, k),
                          realopt::format_value_curve_csv(r.value_curve, hash));
    }
    if (r.threshold_curve) {
      std::filesystem::path p(opt.out_path.empty() ? "sweep.csv" : opt.out_path);
      realopt::write_file(
          (p.parent_path() / (p.stem().string() + ".threshold" + std::to_string(k) + ".csv")).string(),
          realopt::format_threshold_csv(*r.threshold_curve, hash));
    }
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.failed;
  if (failed) std::cerr << failed << " of " << results.size() << " runs failed; see anomaly_flags\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-option indifference valuation on a two-factor binomial lattice"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--out", opt.out_path, "Output CSV path (default: stdout)");
    sub->add_option("--dt", opt.dt, "Time step override (years)");
  };

  auto* price = app.add_subcommand("price", "Value at V0 and t=0 exercise threshold");
  add_common(price);
  auto* threshold = app.add_subcommand("threshold", "Exercise threshold per time step as CSV");
  add_common(threshold);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep (named preset or config sweep section)");
  add_common(sweep);
  sweep->add_option("--workers", opt.workers, "Parallel lattice runs")->check(CLI::PositiveNumber);
  sweep->add_option("--preset", opt.preset, "Figure preset")
      ->check(CLI::IsMember(realopt::preset_names()));
  sweep->add_flag("--no-timing", opt.no_timing, "Write wall_ms as 0 for byte-stable output");
  auto* validate = app.add_subcommand("validate", "Calibration and moment report only");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (price->parsed()) return cmd_price(opt);
    if (threshold->parsed()) return cmd_threshold(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (validate->parsed()) return cmd_validate(opt);
  } catch (const realopt::CalibrationInfeasible& e) {
    std::cerr << "infeasible calibration: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const realopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const realopt::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
