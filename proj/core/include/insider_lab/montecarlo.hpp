#pragma once

// Batch Monte Carlo over independent Brownian paths.
//
// Path k (or antithetic pair k) is driven by derive_seed(master_seed, k), so a
// run is a pure function of its configuration. Workers fill a result slot per
// unit and the reduction walks the slots in index order, which keeps sums
// bitwise identical for any thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "insider_lab/brownian.hpp"
#include "insider_lab/errors.hpp"
#include "insider_lab/forward_sde.hpp"
#include "insider_lab/market.hpp"
#include "insider_lab/schedules.hpp"
#include "insider_lab/strategy.hpp"

namespace insider {

struct McEstimate {
  double mean = 0.0;
  /// Sample standard deviation of the statistical units over sqrt(units).
  /// Under antithetics a unit is the mean of one pair.
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;

  /// units are i.i.d. samples, each averaging paths_per_unit paths.
  static McEstimate from_units(std::span<const double> units, std::size_t paths_per_unit);
};

struct ExperimentConfig {
  MarketCoefficients market;
  EpsilonSchedule schedule;
  Strategy strategy;
  std::size_t n_paths = 200'000;
  std::size_t base_points = 4096;
  double delta = 1e-3;
  std::uint64_t master_seed = 42;
  bool antithetic = true;
  /// 0 selects default_thread_count().
  unsigned threads = 0;
  WealthOptions wealth;
};

/// Throws ValidationError naming the offending field.
void validate(const ExperimentConfig& cfg);

/// INSIDER_LAB_THREADS if set, otherwise the hardware concurrency.
unsigned default_thread_count();

/// The grid every path of the experiment is sampled on: the union grid for
/// anticipating strategies, the plain base grid otherwise.
std::shared_ptr<const TimeGrid> experiment_grid(const ExperimentConfig& cfg);

/// Path number `path_index` of the run (antithetic partners share a seed).
BrownianPath experiment_path(const ExperimentConfig& cfg, std::shared_ptr<const TimeGrid> grid,
                             std::size_t path_index);

/// Mean log-wealth at T - delta. Any path error aborts with a PathError
/// carrying that path's seed.
McEstimate estimate_log_utility(const ExperimentConfig& cfg);

enum class DualityKind {
  ConstantLookAhead,  ///< phi(t) = B(t + eps)
  TerminalValue,      ///< phi(t) = B(T)
  Adapted,            ///< phi(t) = 1
};

struct DualityResult {
  McEstimate mc;
  /// int_0^T E[D_{s+} phi(s) | F_s] ds in closed form.
  double analytic;
};

struct DualityOptions {
  double eps = 0.5;
  bool antithetic = true;
  unsigned threads = 0;
};

DualityResult duality_check(DualityKind kind, double horizon, std::size_t n_paths,
                            std::size_t base_points, std::uint64_t seed, DualityOptions options = {});

struct RegressionResult {
  double slope;
  double std_error;
  std::size_t n;
  /// Theoretical slope.
  double expected;
};

/// No-intercept least-squares slope of B(t+h) - B(t) on B(t+eps) - B(t), h <= eps.
/// The Brownian bridge predicts h / eps.
RegressionResult bridge_drift_regression(double t, double eps, double h, std::size_t n_paths,
                                         std::uint64_t seed, unsigned threads = 0);

/// The same regression for h >= eps; the martingale property predicts 1.
RegressionResult martingale_gap_check(double t, double eps, double h, std::size_t n_paths,
                                      std::uint64_t seed, unsigned threads = 0);

namespace detail {

/// Runs body(i) for i in [0, count) on `threads` workers over contiguous
/// blocks. Rethrows the exception of the lowest failing index.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(workers);
  auto run_block = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
  }
  // Blocks are ordered, so the first failing block holds the lowest index.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

}  // namespace insider
