#include "realopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "realopt/errors.hpp"

namespace realopt {

using nlohmann::json;

namespace {

constexpr const char* kSweepParamNames[] = {"rho", "gamma", "sigma2", "delta", "maturity"};

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return it.key() == a; })) {
      throw ConfigError(where + (where.empty() ? "" : ".") + it.key() + ": unknown field");
    }
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  const json* s = member(root, key);
  if (s == nullptr) return empty;
  if (!s->is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return *s;
}

std::optional<double> number(const json& obj, const std::string& sec, const char* key) {
  const json* v = member(obj, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number()) throw ConfigError(sec + "." + key + ": expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(sec + "." + key + ": must be finite");
  return x;
}

void check(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

std::string opt_double(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string("nan");
}

SweepSpec parse_sweep(const json& s) {
  reject_unknown(s, "sweep", {"name", "values", "range", "outputs"});
  SweepSpec spec;
  const json* name = member(s, "name");
  if (name == nullptr || !name->is_string()) throw ConfigError("sweep.name: required string");
  auto param = parse_sweep_param(name->get<std::string>());
  if (!param) {
    throw ConfigError("sweep.name: must be one of rho, gamma, sigma2, delta, maturity");
  }
  spec.param = *param;

  const json* values = member(s, "values");
  const json* range = member(s, "range");
  if ((values == nullptr) == (range == nullptr)) {
    throw ConfigError("sweep: give exactly one of values or range");
  }
  if (values != nullptr) {
    if (!values->is_array() || values->empty()) {
      throw ConfigError("sweep.values: expected a non-empty array of numbers");
    }
    for (const json& v : *values) {
      if (!v.is_number()) throw ConfigError("sweep.values: expected numbers");
      spec.values.push_back(v.get<double>());
    }
  } else {
    if (!range->is_object()) throw ConfigError("sweep.range: expected {start, stop, count}");
    reject_unknown(*range, "sweep.range", {"start", "stop", "count"});
    auto start = number(*range, "sweep.range", "start");
    auto stop = number(*range, "sweep.range", "stop");
    const json* count = member(*range, "count");
    if (!start || !stop || count == nullptr || !count->is_number_integer()) {
      throw ConfigError("sweep.range: start, stop and integer count are required");
    }
    const long n = count->get<long>();
    check(n >= 1 && n <= 100000, "sweep.range.count", "must be in [1, 100000]");
    for (long k = 0; k < n; ++k) {
      spec.values.push_back(n == 1 ? *start : *start + (*stop - *start) * k / (n - 1));
    }
  }

  if (const json* outs = member(s, "outputs")) {
    if (!outs->is_array()) throw ConfigError("sweep.outputs: expected an array of strings");
    spec.outputs = SweepOutputs{false, false, false};
    for (const json& o : *outs) {
      const std::string v = o.is_string() ? o.get<std::string>() : "";
      if (v == "threshold_at_t0") {
        spec.outputs.threshold_at_t0 = true;
      } else if (v == "threshold_curve") {
        spec.outputs.threshold_curve = true;
      } else if (v == "value_curve") {
        spec.outputs.value_curve = true;
      } else {
        throw ConfigError("sweep.outputs: unknown output '" + v + "'");
      }
    }
  }
  spec.validate();
  return spec;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view to_string(SweepParam p) { return kSweepParamNames[static_cast<int>(p)]; }

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
  for (int k = 0; k < 5; ++k) {
    if (name == kSweepParamNames[k]) return static_cast<SweepParam>(k);
  }
  return std::nullopt;
}

void SweepSpec::validate() const {
  const std::string field = "sweep." + std::string(to_string(param));
  for (double v : values) {
    check(std::isfinite(v), field, "values must be finite");
    switch (param) {
      case SweepParam::kRho:
        check(v >= -1.0 && v <= 1.0, field, "values must lie in [-1, 1]");
        break;
      case SweepParam::kGamma:
        check(v > 0.0, field, "values must be > 0");
        break;
      case SweepParam::kSigma2:
        check(v > 0.0, field, "values must be > 0");
        break;
      case SweepParam::kDelta:
        break;
      case SweepParam::kMaturity:
        check(v > 0.0, field, "values must be > 0");
        break;
    }
  }
}

ResolvedConfig base_config(double rho, double gamma) {
  ResolvedConfig c;
  c.market.rho = rho;
  c.delta = 0.04;
  c.market.mu2 = mu2_from_shortfall(c.market, c.delta);
  c.option.gamma = gamma;
  return c;
}

ResolvedConfig ResolvedConfig::with(SweepParam p, double value) const {
  ResolvedConfig c = *this;
  c.sweep.reset();
  switch (p) {
    case SweepParam::kRho:
      c.market.rho = value;
      break;
    case SweepParam::kGamma:
      c.option.gamma = value;
      return c;
    case SweepParam::kSigma2:
      c.market.sigma2 = value;
      break;
    case SweepParam::kDelta:
      c.delta = value;
      break;
    case SweepParam::kMaturity:
      c.option.maturity = value;
      return c;
  }
  c.market.mu2 = mu2_from_shortfall(c.market, c.delta);
  c.mu2_given = false;
  return c;
}

std::string ResolvedConfig::canonical_json() const {
  json j;
  j["market"] = {{"mu1", market.mu1}, {"sigma1", market.sigma1}, {"s0", market.s0},
                 {"v0", market.v0}, {"r", market.r}};
  j["project"] = {{"mu2", market.mu2}, {"delta", delta}, {"sigma2", market.sigma2},
                  {"rho", market.rho}};
  j["option"] = {{"cost", option.cost}, {"cost_growth", option.cost_growth},
                 {"maturity", option.maturity}, {"gamma", option.gamma}};
  j["grid"] = {{"dt", grid.dt}};
  if (grid.m_override) j["grid"]["m_override"] = *grid.m_override;
  if (sweep) {
    j["sweep"] = {{"name", std::string(to_string(sweep->param))}, {"values", sweep->values}};
  }
  return j.dump();
}

std::uint64_t ResolvedConfig::hash() const { return fnv1a64(canonical_json()); }

ResolvedConfig parse_config(std::string_view text) {
  json root;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) text = "{}";
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown(root, "", {"market", "project", "option", "grid", "sweep"});

  const json& mkt = section(root, "market");
  const json& prj = section(root, "project");
  const json& opt = section(root, "option");
  const json& grd = section(root, "grid");
  reject_unknown(mkt, "market", {"mu1", "sigma1", "s0", "v0", "r"});
  reject_unknown(prj, "project", {"mu2", "delta", "sigma2", "rho"});
  reject_unknown(opt, "option", {"cost", "cost_growth", "maturity", "gamma"});
  reject_unknown(grd, "grid", {"dt", "m_override"});

  std::vector<std::string> missing;
  if (!member(prj, "rho")) missing.emplace_back("project.rho");
  if (!member(opt, "gamma")) missing.emplace_back("option.gamma");
  if (!missing.empty()) {
    std::string msg = "config: missing required fields:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  ResolvedConfig c;
  MarketParams& m = c.market;
  m.mu1 = number(mkt, "market", "mu1").value_or(m.mu1);
  m.sigma1 = number(mkt, "market", "sigma1").value_or(m.sigma1);
  m.s0 = number(mkt, "market", "s0").value_or(m.s0);
  m.v0 = number(mkt, "market", "v0").value_or(m.v0);
  m.r = number(mkt, "market", "r").value_or(m.r);
  m.sigma2 = number(prj, "project", "sigma2").value_or(m.sigma2);
  m.rho = *number(prj, "project", "rho");
  check(m.sigma1 > 0.0, "market.sigma1", "must be > 0");
  check(m.s0 > 0.0, "market.s0", "must be > 0");
  check(m.v0 > 0.0, "market.v0", "must be > 0");
  check(m.sigma2 > 0.0, "project.sigma2", "must be > 0");
  check(m.rho >= -1.0 && m.rho <= 1.0, "project.rho", "must lie in [-1, 1]");

  const auto mu2 = number(prj, "project", "mu2");
  const auto delta = number(prj, "project", "delta");
  if (mu2) {
    m.mu2 = *mu2;
    c.mu2_given = true;
    c.delta = capm_equilibrium_rate(m) - *mu2;
    if (delta && std::fabs(*delta - c.delta) > 1e-12) {
      throw ConfigError("project.delta: inconsistent with project.mu2 (CAPM implies delta = " +
                        format_double(c.delta) + ")");
    }
  } else {
    c.delta = delta.value_or(0.04);
    m.mu2 = mu2_from_shortfall(m, c.delta);
  }

  OptionSpec& o = c.option;
  o.cost = number(opt, "option", "cost").value_or(o.cost);
  o.cost_growth = number(opt, "option", "cost_growth").value_or(o.cost_growth);
  o.maturity = number(opt, "option", "maturity").value_or(o.maturity);
  o.gamma = *number(opt, "option", "gamma");
  check(o.cost > 0.0, "option.cost", "must be > 0");
  check(o.maturity > 0.0, "option.maturity", "must be > 0");
  check(o.gamma > 0.0, "option.gamma", "must be > 0");

  c.grid.dt = number(grd, "grid", "dt").value_or(c.grid.dt);
  check(c.grid.dt > 0.0, "grid.dt", "must be > 0");
  if (const json* mo = member(grd, "m_override")) {
    if (!mo->is_number_integer() || mo->get<long>() < 1) {
      throw ConfigError("grid.m_override: expected an integer >= 1");
    }
    c.grid.m_override = static_cast<int>(mo->get<long>());
  }

  if (const json* s = member(root, "sweep")) {
    if (!s->is_object()) throw ConfigError("sweep: expected an object");
    c.sweep = parse_sweep(*s);
  }
  return c;
}

ResolvedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RunResult run_point(const ResolvedConfig& config, const SweepOutputs& outputs,
                    std::string swept_name, double swept_value) {
  RunResult res;
  res.swept_name = std::move(swept_name);
  res.swept_value = swept_value;
  res.config = config;
  res.option_value_v0 = std::numeric_limits<double>::quiet_NaN();

  const auto start = std::chrono::steady_clock::now();
  try {
    InductionOptions opts;
    opts.retain_full = outputs.value_curve;
    Valuation v = value_option(config.market, config.option, config.grid, opts);
    res.dt = v.grid.dt;
    res.half_height = v.grid.half_height;
    res.n_steps = v.grid.n_steps;
    res.threshold_spot_t0 = v.thresholds.at_t0().spot;
    res.option_value_v0 = v.value_at_v0();

    std::vector<std::string> flags;
    if (!res.threshold_spot_t0) flags.emplace_back("no_exercise_t0");
    if (v.thresholds.at_t0().anomalous) flags.emplace_back("non_upset_t0");
    if (v.thresholds.any_anomalous()) flags.emplace_back("non_upset");
    for (std::size_t k = 0; k < flags.size(); ++k) {
      res.anomaly_flags += (k ? "|" : "") + flags[k];
    }
    if (outputs.threshold_curve) res.threshold_curve = std::move(v.thresholds);
    if (outputs.value_curve) res.value_curve = value_curve(v.values, v.grid, 0);
  } catch (const CalibrationInfeasible& e) {
    res.failed = true;
    res.anomaly_flags = sanitize(std::string("error=calibration_infeasible: ") + e.what());
  } catch (const Error& e) {
    res.failed = true;
    res.anomaly_flags = sanitize(std::string("error: ") + e.what());
  }
  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

template <typename Job>
void parallel_for(std::size_t count, int workers, Job job) {
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) job(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<RunResult> run_sweep(const ResolvedConfig& base, const SweepSpec& spec, int workers) {
  spec.validate();
  std::vector<RunResult> out(spec.values.size());
  const std::string name(to_string(spec.param));
  parallel_for(spec.values.size(), workers, [&](std::size_t k) {
    const double v = spec.values[k];
    out[k] = run_point(base.with(spec.param, v), spec.outputs, name, v);
  });
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1-left", "fig1-right", "fig2-left",
                                              "fig2-right", "fig3", "fig4"};
  return names;
}

std::vector<PresetSeries> make_preset(std::string_view name, const ResolvedConfig& base) {
  auto series = [&](double rho, double gamma, SweepParam p, std::vector<double> values,
                    SweepOutputs outputs = {}) {
    ResolvedConfig b = base.with(SweepParam::kRho, rho).with(SweepParam::kGamma, gamma);
    return PresetSeries{b, SweepSpec{p, std::move(values), outputs}};
  };
  auto grid = [](double lo, double hi, int count) {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(lo + (hi - lo) * k / (count - 1));
    return v;
  };

  std::vector<PresetSeries> out;
  if (name == "fig1-left") {
    std::vector<double> rhos = grid(-0.95, 0.95, 39);
    rhos.push_back(0.99);
    out.push_back(series(0.0, 1.0, SweepParam::kRho, rhos));
  } else if (name == "fig1-right") {
    const std::vector<double> gammas{0.01, 0.05, 0.1, 0.25, 0.5, 1, 2, 5, 10, 20};
    for (double rho : {0.0, 0.5, 0.9}) out.push_back(series(rho, 1.0, SweepParam::kGamma, gammas));
  } else if (name == "fig2-left") {
    out.push_back(series(0.5, 1.0, SweepParam::kSigma2, grid(0.1, 0.4, 13)));
  } else if (name == "fig2-right") {
    out.push_back(series(0.5, 1.0, SweepParam::kDelta, grid(0.01, 0.1, 10)));
  } else if (name == "fig3") {
    const std::vector<double> maturities{0.5, 1, 2, 3, 5, 7.5, 10, 15, 20, 30, 40};
    for (auto [gamma, rho] : {std::pair{0.1, 0.9}, {1.0, 0.9}, {1.0, 0.5}, {10.0, 0.5}}) {
      out.push_back(series(rho, gamma, SweepParam::kMaturity, maturities));
    }
  } else if (name == "fig4") {
    // gamma = 10 reproduces the published thresholds 1.1972 (rho = 0) and 1.7507 (rho = 0.99).
    out.push_back(series(0.0, 10.0, SweepParam::kRho, {0.0, 0.99},
                         SweepOutputs{true, false, true}));
  } else {
    throw ConfigError("preset: unknown name '" + std::string(name) + "'");
  }
  return out;
}

std::vector<RunResult> run_preset(const std::vector<PresetSeries>& preset, int workers) {
  // Flatten so every point across all series shares one worker pool.
  struct Job {
    const PresetSeries* series;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (const auto& s : preset) {
    s.sweep.validate();
    for (std::size_t k = 0; k < s.sweep.values.size(); ++k) jobs.push_back({&s, k});
  }
  std::vector<RunResult> out(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto& s = *jobs[j].series;
    const double v = s.sweep.values[jobs[j].index];
    out[j] = run_point(s.base.with(s.sweep.param, v), s.sweep.outputs,
                       std::string(to_string(s.sweep.param)), v);
  });
  return out;
}

std::string format_sweep_csv(const std::vector<RunResult>& results, std::uint64_t config_hash,
                             bool include_timing) {
  std::ostringstream os;
  os << "# config_hash=" << hex64(config_hash) << '\n';
  os << "swept_name,swept_value,rho,gamma,sigma2,delta,maturity,dt,M,N,threshold_spot_t0,"
        "option_value_v0,anomaly_flags,wall_ms\n";
  for (const RunResult& r : results) {
    os << r.swept_name << ',' << format_double(r.swept_value) << ','
       << format_double(r.config.market.rho) << ',' << format_double(r.config.option.gamma) << ','
       << format_double(r.config.market.sigma2) << ',' << format_double(r.config.delta) << ','
       << format_double(r.config.option.maturity) << ',' << format_double(r.dt) << ','
       << r.half_height << ',' << r.n_steps << ',' << opt_double(r.threshold_spot_t0) << ','
       << format_double(r.option_value_v0) << ',' << r.anomaly_flags << ','
       << format_double(include_timing ? r.wall_ms : 0.0) << '\n';
  }
  return os.str();
}

std::string format_threshold_csv(const ThresholdCurve& curve, std::uint64_t config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << hex64(config_hash) << '\n';
  os << "n,t,time_to_maturity,threshold_discounted,threshold_spot,resolution_halfwidth\n";
  for (const ThresholdPoint& p : curve.points) {
    os << p.n << ',' << format_double(p.t) << ',' << format_double(p.time_to_maturity) << ','
       << opt_double(p.discounted) << ',' << opt_double(p.spot) << ','
       << format_double(p.resolution_halfwidth) << '\n';
  }
  return os.str();
}

std::string format_value_curve_csv(const std::vector<ValuePoint>& curve,
                                   std::uint64_t config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << hex64(config_hash) << '\n';
  os << "V_spot,option_value,exercise_value\n";
  for (const ValuePoint& p : curve) {
    os << format_double(p.v_spot) << ',' << format_double(p.option_value) << ','
       << format_double(p.exercise_value) << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (table.comment.empty()) table.comment = std::string(line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                            : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace realopt
