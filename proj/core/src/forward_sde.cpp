#include "insider_lab/forward_sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>

#include "insider_lab/errors.hpp"
#include "text_util.hpp"

namespace insider {

double forward_integral(std::span<const double> integrand, const BrownianPath& path,
                        std::span<const std::size_t> subgrid) {
  if (subgrid.empty() && integrand.empty()) return 0.0;
  if (integrand.size() + 1 != subgrid.size()) {
    throw ValidationError("forward integral: " + std::to_string(integrand.size()) + " integrand values for " +
                          std::to_string(subgrid.size()) + " sub-grid nodes (need nodes - 1)");
  }
  const auto b = path.values();
  if (subgrid.back() >= b.size()) throw ValidationError("forward integral: sub-grid index outside the path");
  double sum = 0.0;
  for (std::size_t j = 0; j < integrand.size(); ++j) {
    sum += integrand[j] * (b[subgrid[j + 1]] - b[subgrid[j]]);
  }
  return sum;
}

double ito_integral(std::span<const double> integrand, const BrownianPath& path,
                    std::span<const std::size_t> subgrid) {
  return forward_integral(integrand, path, subgrid);
}

WealthPlan::WealthPlan(const MarketCoefficients& market, const Strategy& strategy,
                       std::shared_ptr<const TimeGrid> grid, double delta, WealthOptions options)
    : grid_(std::move(grid)), anticipating_(strategy.anticipating()), pi_cap_(options.pi_cap) {
  if (!grid_) throw ValidationError("wealth plan needs a grid");
  const double horizon = market.horizon();
  if (!(delta >= 0.0 && delta < horizon)) {
    throw ValidationError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  if (pi_cap_ && !(*pi_cap_ > 0.0)) throw ValidationError("pi_cap must be > 0");
  const double end = horizon - delta;
  const auto pts = grid_->points();
  for (std::size_t i : grid_->evaluation_nodes()) {
    if (pts[i] <= end + kMergeTolerance) nodes_.push_back(i);
  }
  if (nodes_.size() < 2 || std::abs(pts[nodes_.back()] - end) > kMergeTolerance) {
    throw ValidationError("T - delta = " + detail::format_double(end) + " is not an evaluation node of the grid");
  }
  horizon_ = pts[nodes_.back()];

  const std::size_t steps = nodes_.size() - 1;
  dt_.resize(steps);
  alpha_.resize(steps);
  beta_.resize(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = pts[nodes_[j]];
    dt_[j] = pts[nodes_[j + 1]] - t;
    alpha_[j] = market.alpha(t);
    beta_[j] = market.beta(t);
  }

  if (!anticipating_) {
    fixed_pi_.resize(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      const double t = pts[nodes_[j]];
      if (const auto* table = std::get_if<CustomTable>(&strategy.kind())) {
        fixed_pi_[j] = table_fraction(*table, t);
      } else {
        fixed_pi_[j] = honest_merton(market, t);
      }
    }
    return;
  }

  const EpsilonSchedule& schedule = strategy.schedule();
  if (schedule.horizon() != horizon) throw ValidationError("schedule horizon differs from the market horizon");
  eps_.resize(steps);
  anchor_.resize(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = pts[nodes_[j]];
    eps_[j] = schedule(t);
    const auto ahead = grid_->find(t + eps_[j]);
    if (!ahead) {
      throw DomainError("look-ahead time t+eps_t=" + detail::format_double(t + eps_[j]) +
                        " is not a node of the path grid (t=" + detail::format_double(t) + ")");
    }
    anchor_[j] = *ahead;
  }

  // The anticipating bias scales like gap / eps_t.
  std::vector<double> times(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) times[j] = pts[nodes_[j]];
  const double gap = tail_gap(times, horizon, delta);
  const double min_eps = *std::ranges::min_element(eps_);
  if (options.enforce_tail_gap && min_eps < kTailGapFactor * gap) {
    throw ValidationError("grid too coarse for the look-ahead: min eps_t=" + detail::format_double(min_eps) +
                          " < 100 x tail gap " + detail::format_double(gap) +
                          "; raise base_points or delta");
  }
}

double WealthPlan::fraction(std::size_t step, std::span<const double> b) const {
  double pi = anticipating_
                  ? insider_fraction(alpha_[step], beta_[step], eps_[step], b[nodes_[step]], b[anchor_[step]])
                  : fixed_pi_[step];
  if (pi_cap_) pi = std::clamp(pi, -*pi_cap_, *pi_cap_);
  return pi;
}

LogWealthSample WealthPlan::evaluate(const BrownianPath& path) const {
  if (path.grid_ptr() != grid_ && !std::ranges::equal(path.grid().points(), grid_->points())) {
    throw ValidationError("path was sampled on a different grid than the wealth plan");
  }
  const auto b = path.values();
  const std::size_t steps = dt_.size();
  thread_local std::vector<double> integrand;
  integrand.resize(steps);
  double drift = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    const double pi = fraction(j, b);
    if (!std::isfinite(pi)) {
      throw NumericalError("non-finite portfolio fraction at t=" + detail::format_double(grid_->points()[nodes_[j]]));
    }
    integrand[j] = pi * beta_[j];
    drift += (pi * alpha_[j] - 0.5 * pi * pi * beta_[j] * beta_[j]) * dt_[j];
  }
  const double stochastic = forward_integral(integrand, path, nodes_);
  return {horizon_, stochastic + drift, stochastic, drift};
}

void WealthPlan::write_trace(std::ostream& out, const BrownianPath& path) const {
  const auto b = path.values();
  const auto pts = grid_->points();
  out << "t,pi,logX\n";
  double log_x = 0.0;
  for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
    const double pi = fraction(j, b);
    out << detail::format_double(pts[nodes_[j]]) << ',' << detail::format_double(pi) << ','
        << detail::format_double(log_x) << '\n';
    log_x += pi * beta_[j] * (b[nodes_[j + 1]] - b[nodes_[j]]) +
             (pi * alpha_[j] - 0.5 * pi * pi * beta_[j] * beta_[j]) * dt_[j];
  }
  out << detail::format_double(horizon_) << ",," << detail::format_double(log_x) << '\n';
}

LogWealthSample log_wealth(const MarketCoefficients& market, const Strategy& strategy,
                           const BrownianPath& path, double delta, WealthOptions options) {
  return WealthPlan(market, strategy, path.grid_ptr(), delta, options).evaluate(path);
}

}  // namespace insider
