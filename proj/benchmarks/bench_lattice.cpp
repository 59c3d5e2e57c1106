#include <benchmark/benchmark.h>

#include <vector>

#include "realopt/calibration.hpp"
#include "realopt/indifference.hpp"
#include "realopt/valuation.hpp"

namespace bm = benchmark;

namespace {

realopt::MarketParams base_market(double rho) {
  realopt::MarketParams m;
  m.rho = rho;
  m.mu2 = realopt::mu2_from_shortfall(m, 0.04);
  return m;
}

}  // namespace

static void BM_IndifferenceKernel(bm::State& st) {
  const auto cal = realopt::calibrate(base_market(0.5), 1.0 / 900.0);
  const realopt::IndifferenceKernel g(cal, realopt::UtilityParams{1.0});
  std::vector<double> xs(1024);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = 0.001 * static_cast<double>(k);
  for (auto _ : st) {
    double acc = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) acc += g(xs[k], xs[k - 1]);
    bm::DoNotOptimize(acc);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(xs.size() - 1));
}
BENCHMARK(BM_IndifferenceKernel);

// Steps per year as the argument; T = 10.
static void BM_ValueOption(bm::State& st) {
  const auto market = base_market(0.5);
  realopt::OptionSpec spec;
  spec.gamma = 1.0;
  realopt::GridControls grid;
  grid.dt = 1.0 / static_cast<double>(st.range(0));
  for (auto _ : st) {
    auto v = realopt::value_option(market, spec, grid);
    bm::DoNotOptimize(v.value_at_v0());
  }
}
BENCHMARK(BM_ValueOption)->Arg(100)->Arg(300)->Arg(900)->Unit(bm::kMillisecond);

BENCHMARK_MAIN();
