#include "insider_lab/market.hpp"

#include <algorithm>
#include <cmath>

#include "insider_lab/errors.hpp"
#include "text_util.hpp"

namespace insider {

PiecewiseConstant::PiecewiseConstant(std::vector<double> starts, std::vector<double> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
  if (starts_.empty() || starts_.size() != values_.size()) {
    throw ValidationError("piecewise-constant function needs one value per breakpoint");
  }
  if (starts_.front() != 0.0) throw ValidationError("piecewise-constant function must start at t=0");
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !std::isfinite(starts_[i])) {
      throw ValidationError("piecewise-constant breakpoints and values must be finite");
    }
    if (i > 0 && !(starts_[i] > starts_[i - 1])) {
      throw ValidationError("piecewise-constant breakpoints must be strictly increasing");
    }
  }
}

double PiecewiseConstant::operator()(double t) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - starts_.begin()) - 1];
}

MarketCoefficients::MarketCoefficients(PiecewiseConstant alpha, PiecewiseConstant beta, double horizon,
                                       double x0, double beta_min)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), horizon_(horizon), x0_(x0), beta_min_(beta_min) {
  if (!(std::isfinite(horizon_) && horizon_ > 0.0)) throw ValidationError("horizon T must be > 0");
  if (!(std::isfinite(x0_) && x0_ > 0.0)) throw ValidationError("initial wealth x0 must be > 0");
  if (!(beta_min_ > 0.0)) throw ValidationError("beta_min must be > 0");
  for (const auto* f : {&alpha_, &beta_}) {
    if (f->starts().back() > horizon_) {
      throw ValidationError("coefficient breakpoints must lie within [0, T]");
    }
  }
  for (double b : beta_.values()) {
    if (std::abs(b) < beta_min_) {
      throw ValidationError("volatility |beta|=" + detail::format_double(std::abs(b)) + " is below beta_min=" +
                            detail::format_double(beta_min_));
    }
  }
}

std::vector<double> MarketCoefficients::breakpoints(double a, double b) const {
  std::vector<double> pts{a, b};
  for (const auto* f : {&alpha_, &beta_}) {
    for (double s : f->starts()) {
      if (s > a && s < b) pts.push_back(s);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double MarketCoefficients::sharpe_squared_integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  const auto pts = breakpoints(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double sharpe = alpha(pts[i]) / beta(pts[i]);
    total += sharpe * sharpe * (pts[i + 1] - pts[i]);
  }
  return total;
}

}  // namespace insider
