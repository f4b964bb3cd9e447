#pragma once

// Left-endpoint Riemann sums for forward integrals and the pathwise
// log-wealth of a portfolio rule.
//
// With x0 = 1 the wealth under pi is the exponential
//   log X(t) = int pi beta d^-B + int (pi alpha - pi^2 beta^2 / 2) ds,
// so log-wealth is computed directly and stays positive by construction.
// The stochastic part always evaluates the integrand at the left endpoint of
// each step; any other rule estimates a different integral for anticipating
// integrands.

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "insider_lab/brownian.hpp"
#include "insider_lab/market.hpp"
#include "insider_lab/strategy.hpp"

namespace insider {

struct LogWealthSample {
  double horizon;
  double log_wealth;
  double stochastic_part;
  double drift_part;
};

/// sum_j integrand[j] * (B(t_{subgrid[j+1]}) - B(t_{subgrid[j]})).
/// integrand holds one value per left endpoint (subgrid.size() - 1 values).
double forward_integral(std::span<const double> integrand, const BrownianPath& path,
                        std::span<const std::size_t> subgrid);

/// The Ito left-endpoint sum for adapted integrands. Same sum as
/// forward_integral; the two integrals coincide for adapted integrands.
double ito_integral(std::span<const double> integrand, const BrownianPath& path,
                    std::span<const std::size_t> subgrid);

/// Minimal look-ahead / tail-gap ratio required of anticipating strategies.
inline constexpr double kTailGapFactor = 100.0;

struct WealthOptions {
  /// Optional |pi| <= cap clipping, off by default.
  std::optional<double> pi_cap;
  /// Hand-sized grids in worked examples may switch the tail-gap rule off.
  bool enforce_tail_gap = true;
};

/// Precomputed evaluation of log-wealth on one grid: per-step coefficients,
/// look-ahead anchors and deterministic fractions are resolved once, then
/// applied to many paths.
class WealthPlan {
 public:
  /// Uses the grid's evaluation nodes on [0, T - delta]. T - delta must be a
  /// node. For anticipating strategies every anchor t_j + eps_{t_j} must be a
  /// node and min eps_{t_j} >= kTailGapFactor * (largest gap of the
  /// [T - 10 delta, T - delta] block, or the last gap when delta = 0).
  WealthPlan(const MarketCoefficients& market, const Strategy& strategy,
             std::shared_ptr<const TimeGrid> grid, double delta, WealthOptions options = {});

  LogWealthSample evaluate(const BrownianPath& path) const;

  /// CSV "t,pi,logX" along the path, one row per evaluation node.
  void write_trace(std::ostream& out, const BrownianPath& path) const;

  std::span<const std::size_t> subgrid() const noexcept { return nodes_; }
  double horizon() const noexcept { return horizon_; }
  const TimeGrid& grid() const noexcept { return *grid_; }

 private:
  double fraction(std::size_t step, std::span<const double> b) const;

  std::shared_ptr<const TimeGrid> grid_;
  double horizon_ = 0.0;
  bool anticipating_ = false;
  std::optional<double> pi_cap_;
  std::vector<std::size_t> nodes_;
  std::vector<double> dt_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> eps_;
  std::vector<std::size_t> anchor_;
  std::vector<double> fixed_pi_;
};

/// One-shot log-wealth of X(T - delta) along a path.
LogWealthSample log_wealth(const MarketCoefficients& market, const Strategy& strategy,
                           const BrownianPath& path, double delta, WealthOptions options = {});

}  // namespace insider
