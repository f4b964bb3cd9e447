#pragma once

// Portfolio rules pi(t): the fraction of wealth held in the risky asset.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "insider_lab/brownian.hpp"
#include "insider_lab/market.hpp"
#include "insider_lab/schedules.hpp"

namespace insider {

/// pi = alpha / beta^2, the optimum without inside information.
struct HonestMerton {
  bool operator==(const HonestMerton&) const = default;
};

/// pi = alpha / beta^2 + (B(t + eps_t) - B(t)) / (beta eps_t).
struct InsiderOptimal {
  EpsilonSchedule schedule;
  bool operator==(const InsiderOptimal&) const = default;
};

struct FractionKnot {
  double t;
  double fraction;
  bool operator==(const FractionKnot&) const = default;
};

/// Deterministic step rule: fraction of the last knot with knot.t <= t.
struct CustomTable {
  std::vector<FractionKnot> knots;
  bool operator==(const CustomTable&) const = default;
};

class Strategy {
 public:
  using Kind = std::variant<HonestMerton, InsiderOptimal, CustomTable>;

  explicit Strategy(Kind kind);

  static Strategy honest() { return Strategy(HonestMerton{}); }
  static Strategy insider(EpsilonSchedule schedule) { return Strategy(InsiderOptimal{std::move(schedule)}); }
  static Strategy table(std::vector<FractionKnot> knots) { return Strategy(CustomTable{std::move(knots)}); }

  const Kind& kind() const noexcept { return kind_; }

  /// True when pi(t) reads the path beyond t.
  bool anticipating() const noexcept { return std::holds_alternative<InsiderOptimal>(kind_); }

  /// The insider's schedule; throws ValidationError for other kinds.
  const EpsilonSchedule& schedule() const;

  /// "merton", "insider" or "table".
  std::string name() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  Kind kind_;
};

/// Value of a CustomTable at t.
double table_fraction(const CustomTable& table, double t);

/// The insider portfolio from its ingredients. Every insider evaluation in the
/// library goes through this expression so that all routes agree bitwise.
inline double insider_fraction(double alpha, double beta, double eps, double b_now, double b_ahead) {
  return alpha / (beta * beta) - (b_now - b_ahead) / (beta * eps);
}

double honest_merton(const MarketCoefficients& m, double t);

/// Throws DomainError naming the missing time when t or t + eps_t is not a
/// node of the path's grid.
double insider_optimal(const MarketCoefficients& m, const EpsilonSchedule& s,
                       const BrownianPath& path, double t);

/// alpha / beta^2 + malliavin_ratio(B(t), B(t + eps_t), eps_t) / beta.
double donsker_composed(const MarketCoefficients& m, const EpsilonSchedule& s,
                        const BrownianPath& path, double t);

/// The two-signal form: the ratio is taken from cond_delta_deriv_2d and
/// cond_delta_2d with a second signal y2 = B(t + eps2) supplied by the caller.
/// The result does not depend on (eps2, y2) up to rounding.
double donsker_composed_two_signal(const MarketCoefficients& m, const EpsilonSchedule& s,
                                   const BrownianPath& path, double t, double eps2, double y2);

/// pi(t) for any strategy kind.
double evaluate(const Strategy& strategy, const MarketCoefficients& m, const BrownianPath& path,
                double t);

/// "merton", "insider" (uses schedule) or "table:@<file.csv>" (columns t,pi).
Strategy parse_strategy(std::string_view literal, const EpsilonSchedule& schedule);

std::vector<FractionKnot> read_fraction_csv(const std::filesystem::path& path);

}  // namespace insider
