#pragma once

// Closed-form expected log-utility and theory-vs-Monte-Carlo reports.
//
// The insider optimum attains
//   E[log X(T)] = 1/2 int_0^T (1/eps_t + (alpha/beta)^2) dt,
// which is infinite exactly when int 1/eps_t dt is. Non-viable schedules are
// reported at the truncated horizon T - delta.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "insider_lab/market.hpp"
#include "insider_lab/montecarlo.hpp"
#include "insider_lab/schedules.hpp"
#include "insider_lab/strategy.hpp"

namespace insider {

inline constexpr double kDefaultAbsTol = 0.02;

/// 1/2 [int_0^{T-delta} 1/eps_t dt + int_0^{T-delta} (alpha/beta)^2 dt].
/// The first integral is closed-form when one exists, adaptive quadrature
/// otherwise. Throws DomainError for delta = 0 on a non-viable schedule.
double theoretical_utility(const MarketCoefficients& m, const EpsilonSchedule& s, double delta);

/// 1/2 int_0^{T-delta} (alpha/beta)^2 dt, the honest Merton value.
double merton_utility(const MarketCoefficients& m, double delta);

/// Exact expected log-utility of the given strategy at T - delta: the insider
/// value, the Merton value, or int (pi alpha - pi^2 beta^2 / 2) dt for a
/// deterministic table.
double strategy_theory(const MarketCoefficients& m, const EpsilonSchedule& s,
                       const Strategy& strategy, double delta);

enum class Verdict { Pass, Fail };

struct ComparisonReport {
  double theory;
  McEstimate mc;
  /// (mean - theory) / stderr; +-inf when stderr is 0 and the means differ.
  double z_score;
  Verdict verdict;
  double delta;
  double abs_tol;
};

/// Pass iff |mean - theory| <= max(3 stderr, abs_tol).
ComparisonReport make_report(double theory, const McEstimate& mc, double delta, double abs_tol);

ComparisonReport compare(const ExperimentConfig& cfg, double abs_tol = kDefaultAbsTol);

/// One report per delta; deltas must be strictly decreasing.
std::vector<ComparisonReport> truncation_sweep(const ExperimentConfig& cfg,
                                               std::span<const double> deltas,
                                               double abs_tol = kDefaultAbsTol);

/// CSV "delta,theory,mc_mean,mc_stderr,z,verdict".
void write_sweep_csv(std::ostream& out, std::span<const ComparisonReport> reports);

std::string to_string(Verdict verdict);

}  // namespace insider
