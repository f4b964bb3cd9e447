#include "insider_lab/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "insider_lab/errors.hpp"
#include "insider_lab/quadrature.hpp"
#include "text_util.hpp"

namespace insider {
namespace {

using detail::Overloaded;

constexpr int kRegimeSamples = 1024;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

double regime_tolerance(double horizon) { return 1e-12 * std::max(1.0, horizon); }

std::vector<double> sample_times(double horizon) {
  std::vector<double> ts(kRegimeSamples);
  for (int i = 0; i < kRegimeSamples; ++i) ts[i] = horizon * i / kRegimeSamples;
  return ts;
}

void validate_kind(const EpsilonSchedule::Kind& kind, double horizon) {
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (!finite_positive(p.exponent)) {
                     throw ValidationError("powerlaw exponent q must be > 0");
                   }
                   if (p.exponent != 1.0 && horizon > 1.0) {
                     throw ValidationError(
                         "powerlaw with q != 1 requires T <= 1: (T - t)^q >= T - t only holds "
                         "while T - t <= 1");
                   }
                 },
                 [](const Constant& c) {
                   if (!finite_positive(c.value)) throw ValidationError("const look-ahead must be > 0");
                 },
                 [](const AffineBelow& a) {
                   if (!(a.slope > 0.0 && a.slope <= 1.0)) {
                     throw ValidationError("affine_below slope c must lie in (0, 1]");
                   }
                 },
                 [&](const Table& t) {
                   if (t.knots.size() < 2) throw ValidationError("table schedule needs at least 2 knots");
                   for (std::size_t i = 0; i < t.knots.size(); ++i) {
                     const auto& k = t.knots[i];
                     if (!std::isfinite(k.t)) throw ValidationError("table knot time is not finite");
                     if (!finite_positive(k.eps)) {
                       throw ValidationError("table eps must be > 0 (knot t=" + detail::format_double(k.t) + ")");
                     }
                     if (i > 0 && !(k.t > t.knots[i - 1].t)) {
                       throw ValidationError("table knot times must be strictly increasing");
                     }
                   }
                   if (t.knots.front().t != 0.0) throw ValidationError("table must start at t=0");
                   if (t.knots.back().t < horizon) {
                     throw ValidationError("table must cover [0, T]; last knot t=" +
                                           detail::format_double(t.knots.back().t) + " < T=" +
                                           detail::format_double(horizon));
                   }
                 },
             },
             kind);
}

double power_integral(double q, double lower, double upper) {
  // int_lower^upper s^{-q} ds
  if (q == 1.0) return std::log(upper / lower);
  return (std::pow(upper, 1.0 - q) - std::pow(lower, 1.0 - q)) / (1.0 - q);
}

}  // namespace

EpsilonSchedule::EpsilonSchedule(Kind kind, double horizon) : kind_(std::move(kind)), horizon_(horizon) {
  if (!finite_positive(horizon_)) throw ValidationError("horizon T must be > 0");
  validate_kind(kind_, horizon_);
  if (std::holds_alternative<Table>(kind_) && regime(*this) == Regime::AboveHorizon) {
    // t + eps_t must come down to T monotonically once it starts descending.
    const auto ts = sample_times(horizon_);
    std::vector<double> reach(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) reach[i] = ts[i] + eval_unchecked(ts[i]);
    const auto peak = std::max_element(reach.begin(), reach.end());
    const double tol = regime_tolerance(horizon_);
    for (auto it = peak; it + 1 != reach.end(); ++it) {
      if (*(it + 1) > *it + tol) {
        throw ValidationError("table schedule: t + eps_t must approach T monotonically from above");
      }
    }
  }
}

EpsilonSchedule EpsilonSchedule::power_law(double exponent, double horizon) {
  return {PowerLaw{exponent}, horizon};
}
EpsilonSchedule EpsilonSchedule::constant(double value, double horizon) {
  return {Constant{value}, horizon};
}
EpsilonSchedule EpsilonSchedule::affine_below(double slope, double horizon) {
  return {AffineBelow{slope}, horizon};
}
EpsilonSchedule EpsilonSchedule::table(std::vector<ScheduleKnot> knots, double horizon) {
  return {Table{std::move(knots)}, horizon};
}

double EpsilonSchedule::eval_unchecked(double t) const {
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) { return std::pow(horizon_ - t, p.exponent); },
                        [](const Constant& c) { return c.value; },
                        [&](const AffineBelow& a) { return a.slope * (horizon_ - t); },
                        [&](const Table& tab) {
                          const auto& k = tab.knots;
                          auto hi = std::upper_bound(k.begin(), k.end(), t,
                                                     [](double x, const ScheduleKnot& n) { return x < n.t; });
                          if (hi == k.end()) return k.back().eps;
                          auto lo = hi - 1;
                          const double w = (t - lo->t) / (hi->t - lo->t);
                          return lo->eps + w * (hi->eps - lo->eps);
                        },
                    },
                    kind_);
}

double EpsilonSchedule::operator()(double t) const {
  if (!(t >= 0.0 && t < horizon_)) {
    throw DomainError("eps_t requested at t=" + detail::format_double(t) + " outside [0, T=" +
                      detail::format_double(horizon_) + ")");
  }
  return eval_unchecked(t);
}

double EpsilonSchedule::eval_closed(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw DomainError("eps_t requested at t=" + detail::format_double(t) + " outside [0, T=" +
                      detail::format_double(horizon_) + "]");
  }
  return eval_unchecked(t);
}

std::string EpsilonSchedule::literal() const {
  return std::visit(Overloaded{
                        [](const PowerLaw& p) { return "powerlaw:q=" + detail::format_double(p.exponent); },
                        [](const Constant& c) { return "const:" + detail::format_double(c.value); },
                        [](const AffineBelow& a) { return "affine_below:c=" + detail::format_double(a.slope); },
                        [](const Table& t) { return "table:<" + std::to_string(t.knots.size()) + " knots>"; },
                    },
                    kind_);
}

double eval_epsilon(const EpsilonSchedule& schedule, double t) { return schedule(t); }

Regime regime(const EpsilonSchedule& schedule) {
  const double horizon = schedule.horizon();
  const double tol = regime_tolerance(horizon);
  bool above = true;
  bool below = true;
  for (double t : sample_times(horizon)) {
    const double reach = t + schedule(t);
    above = above && reach >= horizon - tol;
    below = below && reach <= horizon + tol;
  }
  if (above && below) {
    // t + eps_t == T: the affine family is the below-horizon model.
    return std::holds_alternative<AffineBelow>(schedule.kind()) ? Regime::BelowHorizon
                                                               : Regime::AboveHorizon;
  }
  if (above) return Regime::AboveHorizon;
  if (below) return Regime::BelowHorizon;
  return Regime::Mixed;
}

double viability_integral(const EpsilonSchedule& schedule, double delta, double tol) {
  const double horizon = schedule.horizon();
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be > 0");
  if (!(delta >= 0.0 && delta < horizon)) {
    throw DomainError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  if (delta == 0.0 && !(schedule.eval_closed(horizon) > 0.0)) {
    throw DomainError("1/eps_t is unbounded at T for " + schedule.literal() + "; use delta > 0");
  }
  const double upper = horizon - delta;

  // Panels shrink geometrically toward T so each one sees a bounded
  // variation of 1/eps_t; table knots are panel edges since 1/eps_t kinks there.
  std::vector<double> edges{0.0, upper};
  for (double gap = 0.5 * horizon; horizon - gap < upper && gap > 0.0; gap *= 0.5) {
    edges.push_back(horizon - gap);
  }
  if (const auto* table = std::get_if<Table>(&schedule.kind())) {
    for (const auto& k : table->knots) {
      if (k.t > 0.0 && k.t < upper) edges.push_back(k.t);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const std::function<double(double)> inverse = [&](double t) { return 1.0 / schedule.eval_closed(t); };
  return quadrature::integrate_panels(inverse, edges, {.tolerance = tol, .max_depth = 40});
}

std::optional<double> analytic_viability_integral(const EpsilonSchedule& schedule, double delta) {
  const double horizon = schedule.horizon();
  if (!(delta >= 0.0 && delta < horizon)) {
    throw DomainError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) -> std::optional<double> {
                          if (delta == 0.0) {
                            if (p.exponent >= 1.0) return std::nullopt;
                            return std::pow(horizon, 1.0 - p.exponent) / (1.0 - p.exponent);
                          }
                          return power_integral(p.exponent, delta, horizon);
                        },
                        [&](const Constant& c) -> std::optional<double> { return (horizon - delta) / c.value; },
                        [&](const AffineBelow& a) -> std::optional<double> {
                          if (delta == 0.0) return std::nullopt;
                          return std::log(horizon / delta) / a.slope;
                        },
                        [](const Table&) -> std::optional<double> { return std::nullopt; },
                    },
                    schedule.kind());
}

ViabilityReport classify_viability(const EpsilonSchedule& schedule) {
  const double horizon = schedule.horizon();
  const Regime reg = regime(schedule);
  const bool is_constant = std::holds_alternative<Constant>(schedule.kind());
  if (reg == Regime::Mixed && !is_constant) {
    throw ValidationError(schedule.literal() +
                          " crosses the horizon: t + eps_t is above T for some t and below for others");
  }

  ViabilityReport report{std::nullopt, Classification::Viable, IntegralMethod::Analytic, {}};
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    if (d < horizon) report.truncation_trace.push_back({d, viability_integral(schedule, d)});
  }

  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (reg == Regime::BelowHorizon) {
                     report.classification = Classification::NotViableBelowHorizon;
                   } else if (p.exponent >= 1.0) {
                     report.classification = Classification::NotViable;
                   } else {
                     report.integral_value = std::pow(horizon, 1.0 - p.exponent) / (1.0 - p.exponent);
                   }
                 },
                 [&](const Constant& c) { report.integral_value = horizon / c.value; },
                 [&](const AffineBelow&) { report.classification = Classification::NotViableBelowHorizon; },
                 [&](const Table&) {
                   report.method = IntegralMethod::Quadrature;
                   // Divergent tails in scope grow at least logarithmically, so
                   // a >10% gain from delta = 1e-4 to 1e-6 flags divergence.
                   const double i4 = viability_integral(schedule, std::min(1e-4, 0.5 * horizon));
                   const double i6 = viability_integral(schedule, std::min(1e-6, 0.5 * horizon));
                   const bool divergent = i6 - i4 > 0.1 * i4;
                   // Knots are positive, so a convergent table is bounded up to T.
                   if (!divergent) report.integral_value = viability_integral(schedule, 0.0);
                   if (reg == Regime::BelowHorizon) {
                     report.classification = Classification::NotViableBelowHorizon;
                   } else if (divergent) {
                     report.classification = Classification::NotViable;
                   }
                 },
             },
             schedule.kind());
  return report;
}

EpsilonSchedule parse_schedule(std::string_view literal, double horizon) {
  const std::string_view text = detail::trim(literal);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("schedule: expected '<kind>:<args>', got '" + std::string(literal) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  auto keyed = [&](std::string_view key) {
    if (args.substr(0, key.size()) != key) {
      throw ValidationError("schedule: '" + std::string(kind) + "' expects '" + std::string(key) +
                            "<value>', got '" + std::string(args) + "'");
    }
    return detail::parse_double(args.substr(key.size()), "schedule " + std::string(kind));
  };
  if (kind == "powerlaw") return EpsilonSchedule::power_law(keyed("q="), horizon);
  if (kind == "const") return EpsilonSchedule::constant(detail::parse_double(args, "schedule const"), horizon);
  if (kind == "affine_below") return EpsilonSchedule::affine_below(keyed("c="), horizon);
  if (kind == "table") {
    if (args.empty() || args.front() != '@') {
      throw ValidationError("schedule: table expects 'table:@<file.csv>'");
    }
    return EpsilonSchedule::table(read_schedule_csv(std::string(args.substr(1))), horizon);
  }
  throw ValidationError("schedule: unknown kind '" + std::string(kind) + "'");
}

std::vector<ScheduleKnot> read_schedule_csv(const std::filesystem::path& path) {
  std::vector<ScheduleKnot> knots;
  for (const auto& [t, eps] : detail::read_two_column_csv(path, "t", "eps")) knots.push_back({t, eps});
  return knots;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::AboveHorizon: return "AboveHorizon";
    case Regime::BelowHorizon: return "BelowHorizon";
    case Regime::Mixed: return "Mixed";
  }
  return "?";
}

std::string to_string(Classification classification) {
  switch (classification) {
    case Classification::Viable: return "Viable";
    case Classification::NotViable: return "NotViable";
    case Classification::NotViableBelowHorizon: return "NotViableBelowHorizon";
  }
  return "?";
}

std::string to_string(IntegralMethod method) {
  return method == IntegralMethod::Analytic ? "Analytic" : "Quadrature";
}

}  // namespace insider
