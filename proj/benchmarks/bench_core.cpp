#include <cmath>
#include <memory>

#include <benchmark/benchmark.h>

#include "insider_lab/brownian.hpp"
#include "insider_lab/donsker.hpp"
#include "insider_lab/forward_sde.hpp"
#include "insider_lab/market.hpp"
#include "insider_lab/montecarlo.hpp"
#include "insider_lab/rng.hpp"
#include "insider_lab/schedules.hpp"
#include "insider_lab/strategy.hpp"

namespace {

using namespace insider;

void BM_SamplePath(benchmark::State& state) {
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(union_grid(static_cast<std::size_t>(state.range(0)), s, 1e-3));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(grid, derive_seed(42, seed++)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid->size()));
}
BENCHMARK(BM_SamplePath)->Arg(1 << 10)->Arg(1 << 12)->Arg(1 << 14);

void BM_InsiderLogWealth(benchmark::State& state) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(union_grid(static_cast<std::size_t>(state.range(0)), s, 1e-3));
  const WealthPlan plan(m, Strategy::insider(s), grid, 1e-3);
  const auto path = sample_path(grid, 7);
  for (auto _ : state) benchmark::DoNotOptimize(plan.evaluate(path));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.subgrid().size()));
}
BENCHMARK(BM_InsiderLogWealth)->Arg(1 << 10)->Arg(1 << 12)->Arg(1 << 14);

void BM_EstimateLogUtility(benchmark::State& state) {
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  ExperimentConfig cfg{.market = MarketCoefficients::constant(0.1, 0.2, 1.0),
                       .schedule = s,
                       .strategy = Strategy::insider(s),
                       .wealth = {}};
  cfg.n_paths = 2000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_log_utility(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_paths));
}
BENCHMARK(BM_EstimateLogUtility)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ViabilityQuadrature(benchmark::State& state) {
  const auto table = EpsilonSchedule::table({{0.0, 1.0}, {0.5, 0.6}, {0.9, 0.2}, {1.0, 0.05}}, 1.0);
  const double delta = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(viability_integral(table, delta));
}
BENCHMARK(BM_ViabilityQuadrature)->DenseRange(2, 6, 2);

void BM_CondDelta2d(benchmark::State& state) {
  const DonskerParams p(0.0, 0.5, 2.0);
  double y = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cond_delta_2d(p, y, 0.5 * y));
    y = y > 3.0 ? -3.0 : y + 1e-3;
  }
}
BENCHMARK(BM_CondDelta2d);

}  // namespace

BENCHMARK_MAIN();
