#pragma once

#include <span>
#include <vector>

namespace insider {

/// Right-continuous step function on [0, inf): value i holds on [starts[i], starts[i+1]).
class PiecewiseConstant {
 public:
  /// starts must begin at 0 and be strictly increasing; sizes must match.
  PiecewiseConstant(std::vector<double> starts, std::vector<double> values);

  static PiecewiseConstant constant(double value) { return PiecewiseConstant({0.0}, {value}); }

  double operator()(double t) const;

  std::span<const double> starts() const noexcept { return starts_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const PiecewiseConstant&, const PiecewiseConstant&) = default;

 private:
  std::vector<double> starts_;
  std::vector<double> values_;
};

/// Drift alpha(t), volatility beta(t), horizon T and initial wealth x0.
/// Log-wealth is always reported for x0 = 1, i.e. as log(X / x0).
class MarketCoefficients {
 public:
  MarketCoefficients(PiecewiseConstant alpha, PiecewiseConstant beta, double horizon,
                     double x0 = 1.0, double beta_min = 1e-6);

  static MarketCoefficients constant(double alpha, double beta, double horizon, double x0 = 1.0) {
    return {PiecewiseConstant::constant(alpha), PiecewiseConstant::constant(beta), horizon, x0};
  }

  double alpha(double t) const { return alpha_(t); }
  double beta(double t) const { return beta_(t); }
  double horizon() const noexcept { return horizon_; }
  double x0() const noexcept { return x0_; }
  double beta_min() const noexcept { return beta_min_; }

  const PiecewiseConstant& alpha_function() const noexcept { return alpha_; }
  const PiecewiseConstant& beta_function() const noexcept { return beta_; }

  /// Sorted union of alpha and beta breakpoints inside [a, b], plus a and b.
  std::vector<double> breakpoints(double a, double b) const;

  /// Exact integral of (alpha / beta)^2 over [a, b].
  double sharpe_squared_integral(double a, double b) const;

  friend bool operator==(const MarketCoefficients&, const MarketCoefficients&) = default;

 private:
  PiecewiseConstant alpha_;
  PiecewiseConstant beta_;
  double horizon_;
  double x0_;
  double beta_min_;
};

}  // namespace insider
