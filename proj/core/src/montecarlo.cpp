#include "insider_lab/montecarlo.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "insider_lab/rng.hpp"
#include "text_util.hpp"

namespace insider {
namespace {

unsigned resolve_threads(unsigned requested) { return requested == 0 ? default_thread_count() : requested; }

PathError wrap_path_error(const std::exception& e, std::uint64_t seed, std::size_t index) {
  char hex[32];
  const auto [end, ec] = std::to_chars(hex, hex + sizeof hex, seed, 16);
  return PathError("path " + std::to_string(index) + " (seed 0x" + std::string(hex, end) + "): " + e.what(), seed,
                   index);
}

template <class Body>
void for_each_seeded(std::size_t count, std::uint64_t master, unsigned threads, Body&& body) {
  detail::parallel_for(count, threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(master, i);
    try {
      body(i, seed);
    } catch (const PathError&) {
      throw;
    } catch (const std::exception& e) {
      throw wrap_path_error(e, seed, i);
    }
  });
}

RegressionResult regress_increments(double t, double eps, double h, std::size_t n_paths, std::uint64_t seed,
                                    unsigned threads, double expected) {
  if (n_paths < 2) throw ValidationError("regression needs n_paths >= 2");
  if (!(t >= 0.0)) throw DomainError("regression time t must be >= 0");
  std::vector<double> pts{0.0, t, t + h, t + eps};
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto grid = std::make_shared<const TimeGrid>(pts);
  const std::size_t i_t = grid->index_of(t);
  const std::size_t i_h = grid->index_of(t + h);
  const std::size_t i_eps = grid->index_of(t + eps);

  std::vector<double> xs(n_paths);
  std::vector<double> ys(n_paths);
  for_each_seeded(n_paths, seed, resolve_threads(threads), [&](std::size_t i, std::uint64_t s) {
    const BrownianPath path = sample_path(grid, s);
    xs[i] = path[i_eps] - path[i_t];
    ys[i] = path[i_h] - path[i_t];
  });

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  if (!(sxx > 0.0)) throw NumericalError("regression: regressor B(t+eps)-B(t) has zero variance");
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    const double r = ys[i] - slope * xs[i];
    ssr += r * r;
  }
  const double se = std::sqrt(ssr / static_cast<double>(n_paths - 1) / sxx);
  return {slope, se, n_paths, expected};
}

}  // namespace

McEstimate McEstimate::from_units(std::span<const double> units, std::size_t paths_per_unit) {
  const std::size_t n = units.size();
  if (n < 2) throw ValidationError("an estimate needs at least 2 independent units");
  double sum = 0.0;
  for (double u : units) sum += u;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double u : units) ss += (u - mean) * (u - mean);
  const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, se, n * paths_per_unit, mean - 1.96 * se, mean + 1.96 * se};
}

void validate(const ExperimentConfig& cfg) {
  const double horizon = cfg.market.horizon();
  if (cfg.n_paths < 100) {
    throw ValidationError("n_paths=" + std::to_string(cfg.n_paths) + " must be >= 100");
  }
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw ValidationError("n_paths=" + std::to_string(cfg.n_paths) + " must be even with antithetic pairs");
  }
  if (cfg.base_points < 256 || !std::has_single_bit(cfg.base_points)) {
    throw ValidationError("base_points=" + std::to_string(cfg.base_points) + " must be a power of two >= 256");
  }
  if (!(cfg.delta >= 0.0 && cfg.delta < horizon)) {
    throw ValidationError("delta=" + detail::format_double(cfg.delta) + " must lie in [0, T)");
  }
  if (cfg.schedule.horizon() != horizon) throw ValidationError("schedule horizon differs from T");
  if (cfg.strategy.anticipating() && !(cfg.strategy.schedule() == cfg.schedule)) {
    throw ValidationError("insider strategy must use the experiment's schedule");
  }
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("INSIDER_LAB_THREADS")) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec == std::errc{} && *ptr == '\0' && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::shared_ptr<const TimeGrid> experiment_grid(const ExperimentConfig& cfg) {
  if (cfg.strategy.anticipating()) {
    return std::make_shared<const TimeGrid>(union_grid(cfg.base_points, cfg.schedule, cfg.delta));
  }
  return std::make_shared<const TimeGrid>(base_points(cfg.base_points, cfg.market.horizon(), cfg.delta));
}

BrownianPath experiment_path(const ExperimentConfig& cfg, std::shared_ptr<const TimeGrid> grid,
                             std::size_t path_index) {
  const std::size_t unit = cfg.antithetic ? path_index / 2 : path_index;
  BrownianPath path = sample_path(std::move(grid), derive_seed(cfg.master_seed, unit));
  if (cfg.antithetic && path_index % 2 == 1) return path.antithetic();
  return path;
}

McEstimate estimate_log_utility(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto grid = experiment_grid(cfg);
  const WealthPlan plan(cfg.market, cfg.strategy, grid, cfg.delta, cfg.wealth);
  const std::size_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  std::vector<double> values(units);
  for_each_seeded(units, cfg.master_seed, resolve_threads(cfg.threads), [&](std::size_t u, std::uint64_t seed) {
    const BrownianPath path = sample_path(grid, seed);
    const double v = plan.evaluate(path).log_wealth;
    values[u] = cfg.antithetic ? 0.5 * (v + plan.evaluate(path.antithetic()).log_wealth) : v;
  });
  return McEstimate::from_units(values, cfg.antithetic ? 2 : 1);
}

DualityResult duality_check(DualityKind kind, double horizon, std::size_t n_paths, std::size_t base_points_count,
                            std::uint64_t seed, DualityOptions options) {
  if (!(horizon > 0.0)) throw ValidationError("horizon T must be > 0");
  if (n_paths < 2 || (options.antithetic && n_paths % 2 != 0)) {
    throw ValidationError("paths must be >= 2 (and even with antithetic pairs)");
  }
  std::shared_ptr<const TimeGrid> grid;
  if (kind == DualityKind::ConstantLookAhead) {
    if (!(options.eps > 0.0)) throw DomainError("look-ahead eps must be > 0");
    grid = std::make_shared<const TimeGrid>(
        union_grid(base_points_count, EpsilonSchedule::constant(options.eps, horizon), 0.0));
  } else {
    grid = std::make_shared<const TimeGrid>(base_points(base_points_count, horizon, 0.0));
  }
  const auto nodes = grid->evaluation_nodes();
  const std::size_t steps = nodes.size() - 1;
  std::vector<std::size_t> lookup(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = (*grid)[nodes[j]];
    lookup[j] = kind == DualityKind::ConstantLookAhead ? grid->index_of(t + options.eps) : nodes.back();
  }

  auto integral = [&](const BrownianPath& path) {
    thread_local std::vector<double> phi;
    phi.resize(steps);
    for (std::size_t j = 0; j < steps; ++j) phi[j] = kind == DualityKind::Adapted ? 1.0 : path[lookup[j]];
    return forward_integral(phi, path, nodes);
  };

  const std::size_t units = options.antithetic ? n_paths / 2 : n_paths;
  std::vector<double> values(units);
  for_each_seeded(units, seed, resolve_threads(options.threads), [&](std::size_t u, std::uint64_t s) {
    const BrownianPath path = sample_path(grid, s);
    const double v = integral(path);
    values[u] = options.antithetic ? 0.5 * (v + integral(path.antithetic())) : v;
  });
  const double analytic = kind == DualityKind::Adapted ? 0.0 : horizon;
  return {McEstimate::from_units(values, options.antithetic ? 2 : 1), analytic};
}

RegressionResult bridge_drift_regression(double t, double eps, double h, std::size_t n_paths, std::uint64_t seed,
                                         unsigned threads) {
  if (!(h > 0.0 && h <= eps)) throw DomainError("bridge regression needs 0 < h <= eps");
  return regress_increments(t, eps, h, n_paths, seed, threads, h / eps);
}

RegressionResult martingale_gap_check(double t, double eps, double h, std::size_t n_paths, std::uint64_t seed,
                                      unsigned threads) {
  if (!(eps > 0.0 && eps <= h)) throw DomainError("martingale gap check needs 0 < eps <= h");
  return regress_increments(t, eps, h, n_paths, seed, threads, 1.0);
}

}  // namespace insider
