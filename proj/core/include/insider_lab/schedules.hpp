#pragma once

// Insider look-ahead schedules t -> eps_t and the integral viability criterion.
//
// At time t the insider knows B(t + eps_t). The market is viable only if the
// integral of 1/eps_t over [0, T) is finite; schedules with t + eps_t <= T
// (the insider sees only the path before the horizon) are never viable.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace insider {

/// eps_t = (T - t)^exponent
struct PowerLaw {
  double exponent;
  bool operator==(const PowerLaw&) const = default;
};

/// eps_t = value
struct Constant {
  double value;
  bool operator==(const Constant&) const = default;
};

/// eps_t = slope * (T - t), slope in (0, 1]
struct AffineBelow {
  double slope;
  bool operator==(const AffineBelow&) const = default;
};

struct ScheduleKnot {
  double t;
  double eps;
  bool operator==(const ScheduleKnot&) const = default;
};

/// Piecewise-linear eps_t through the knots; must cover [0, T].
struct Table {
  std::vector<ScheduleKnot> knots;
  bool operator==(const Table&) const = default;
};

enum class Regime { AboveHorizon, BelowHorizon, Mixed };

class EpsilonSchedule {
 public:
  using Kind = std::variant<PowerLaw, Constant, AffineBelow, Table>;

  /// Validates the kind against the horizon; throws ValidationError.
  EpsilonSchedule(Kind kind, double horizon);

  static EpsilonSchedule power_law(double exponent, double horizon);
  static EpsilonSchedule constant(double value, double horizon);
  static EpsilonSchedule affine_below(double slope, double horizon);
  static EpsilonSchedule table(std::vector<ScheduleKnot> knots, double horizon);

  const Kind& kind() const noexcept { return kind_; }
  double horizon() const noexcept { return horizon_; }

  /// eps_t for 0 <= t < T. Throws DomainError outside that range.
  double operator()(double t) const;

  /// eps_t on the closed interval [0, T]; at t = T the power-law and affine
  /// kinds return 0. Used only for building grids and quadrature endpoints.
  double eval_closed(double t) const;

  /// eps_0, the look-ahead at the start of trading. Metadata only.
  double eps0() const { return (*this)(0.0); }

  /// Literal form accepted by parse_schedule ("powerlaw:q=0.5", ...).
  /// Tables render as "table:<n knots>" since the file path is not retained.
  std::string literal() const;

  friend bool operator==(const EpsilonSchedule&, const EpsilonSchedule&) = default;

 private:
  double eval_unchecked(double t) const;

  Kind kind_;
  double horizon_;
};

double eval_epsilon(const EpsilonSchedule& schedule, double t);

/// Sampled on 1024 points of [0, T). A schedule with t + eps_t == T satisfies
/// both tests; it is reported BelowHorizon for the affine kind and
/// AboveHorizon otherwise.
Regime regime(const EpsilonSchedule& schedule);

/// Adaptive-quadrature value of the integral of 1/eps_t over [0, T - delta].
/// delta = 0 is accepted only when eps_T > 0 (constant and table kinds).
double viability_integral(const EpsilonSchedule& schedule, double delta, double tol = 1e-9);

/// Closed-form value of the same integral, or nullopt for tables and for
/// delta = 0 on a divergent schedule.
std::optional<double> analytic_viability_integral(const EpsilonSchedule& schedule, double delta);

enum class Classification { Viable, NotViable, NotViableBelowHorizon };
enum class IntegralMethod { Analytic, Quadrature };

struct TruncationPoint {
  double delta;
  double partial_integral;
};

struct ViabilityReport {
  /// nullopt means the integral diverges.
  std::optional<double> integral_value;
  Classification classification;
  IntegralMethod method;
  std::vector<TruncationPoint> truncation_trace;

  bool divergent() const noexcept { return !integral_value.has_value(); }
};

/// Throws ValidationError for a Mixed-regime table or power law.
ViabilityReport classify_viability(const EpsilonSchedule& schedule);

/// Parses "powerlaw:q=<q>", "const:<v>", "affine_below:c=<c>" or
/// "table:@<file.csv>" (CSV with header, columns t,eps).
EpsilonSchedule parse_schedule(std::string_view literal, double horizon);

std::vector<ScheduleKnot> read_schedule_csv(const std::filesystem::path& path);

std::string to_string(Regime regime);
std::string to_string(Classification classification);
std::string to_string(IntegralMethod method);

}  // namespace insider
