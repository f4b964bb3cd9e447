#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "insider_lab/analysis.hpp"
#include "insider_lab/errors.hpp"
#include "insider_lab/montecarlo.hpp"

namespace insider {
namespace {

ExperimentConfig small_config(Strategy strategy, EpsilonSchedule schedule, std::size_t paths = 2000) {
  ExperimentConfig cfg{.market = MarketCoefficients::constant(0.1, 0.2, 1.0),
                       .schedule = std::move(schedule),
                       .strategy = std::move(strategy),
                       .wealth = {}};
  cfg.n_paths = paths;
  cfg.base_points = 1024;
  cfg.delta = 1e-2;
  cfg.threads = 1;
  return cfg;
}

ExperimentConfig insider_config(std::size_t paths = 2000) {
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  return small_config(Strategy::insider(s), s, paths);
}

TEST(McEstimate, FromUnitsUsesUnitSpread) {
  const std::vector<double> units{1.0, 2.0, 3.0, 4.0};
  const McEstimate e = McEstimate::from_units(units, 2);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0) / 2.0);
  EXPECT_EQ(e.n_paths, 8u);
  EXPECT_DOUBLE_EQ(e.ci95_low, 2.5 - 1.96 * e.std_error);
  EXPECT_DOUBLE_EQ(e.ci95_high, 2.5 + 1.96 * e.std_error);
  EXPECT_THROW(McEstimate::from_units(std::vector<double>{1.0}, 1), ValidationError);
}

TEST(ExperimentConfigValidation, RejectsOutOfContractFields) {
  auto expect_invalid = [](ExperimentConfig cfg, const char* field) {
    try {
      validate(cfg);
      ADD_FAILURE() << "accepted invalid " << field;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  auto cfg = insider_config();
  EXPECT_NO_THROW(validate(cfg));
  cfg.n_paths = 50;
  expect_invalid(cfg, "n_paths");
  cfg = insider_config();
  cfg.n_paths = 2001;
  expect_invalid(cfg, "n_paths");
  cfg.antithetic = false;
  EXPECT_NO_THROW(validate(cfg));
  cfg = insider_config();
  cfg.base_points = 1000;
  expect_invalid(cfg, "base_points");
  cfg.base_points = 128;
  expect_invalid(cfg, "base_points");
  cfg = insider_config();
  cfg.delta = 1.0;
  expect_invalid(cfg, "delta");
  cfg = insider_config();
  cfg.schedule = EpsilonSchedule::power_law(0.25, 1.0);
  expect_invalid(cfg, "schedule");
}

TEST(EstimateLogUtility, ZeroFractionHasZeroMeanAndError) {
  auto cfg = small_config(Strategy::table({{0.0, 0.0}}), EpsilonSchedule::power_law(0.5, 1.0), 200);
  const McEstimate e = estimate_log_utility(cfg);
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.n_paths, 200u);
}

TEST(EstimateLogUtility, IdenticalAcrossRunsAndThreadCounts) {
  auto cfg = insider_config();
  const McEstimate one = estimate_log_utility(cfg);
  cfg.threads = 3;
  const McEstimate three = estimate_log_utility(cfg);
  cfg.threads = 8;
  const McEstimate eight = estimate_log_utility(cfg);
  EXPECT_EQ(one.mean, three.mean);
  EXPECT_EQ(one.std_error, three.std_error);
  EXPECT_EQ(one.mean, eight.mean);
  EXPECT_EQ(one.std_error, eight.std_error);
}

TEST(EstimateLogUtility, SeedChangesTheSample) {
  auto cfg = insider_config();
  const double a = estimate_log_utility(cfg).mean;
  cfg.master_seed = 43;
  EXPECT_NE(a, estimate_log_utility(cfg).mean);
}

TEST(EstimateLogUtility, AntitheticPairsShareASeed) {
  auto cfg = insider_config(200);
  const auto grid = experiment_grid(cfg);
  const BrownianPath p0 = experiment_path(cfg, grid, 0);
  const BrownianPath p1 = experiment_path(cfg, grid, 1);
  for (std::size_t i = 0; i < grid->size(); ++i) ASSERT_EQ(p1[i], -p0[i]);
  cfg.antithetic = false;
  EXPECT_NE(experiment_path(cfg, grid, 1)[1], -experiment_path(cfg, grid, 0)[1]);
}

TEST(EstimateLogUtility, HonestMatchesClosedForm) {
  auto cfg = small_config(Strategy::honest(), EpsilonSchedule::power_law(0.5, 1.0), 20000);
  cfg.antithetic = false;
  const McEstimate e = estimate_log_utility(cfg);
  EXPECT_NEAR(e.mean, 0.125 * 0.99, 3.0 * e.std_error);
  // With antithetic pairs the stochastic part cancels exactly.
  cfg.antithetic = true;
  EXPECT_NEAR(estimate_log_utility(cfg).mean, 0.125 * 0.99, 1e-12);
}

TEST(EstimateLogUtility, InsiderMatchesTheoryOnModestRun) {
  const auto cfg = insider_config(20000);
  const McEstimate e = estimate_log_utility(cfg);
  const double theory = theoretical_utility(cfg.market, cfg.schedule, cfg.delta);
  EXPECT_NEAR(e.mean, theory, std::max(3.0 * e.std_error, 0.02));
}

TEST(EstimateLogUtility, ConfidenceIntervalCoverage) {
  auto cfg = small_config(Strategy::honest(), EpsilonSchedule::power_law(0.5, 1.0), 200);
  cfg.base_points = 256;
  cfg.delta = 0.0;
  cfg.antithetic = false;
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    cfg.master_seed = seed;
    const McEstimate e = estimate_log_utility(cfg);
    if (e.ci95_low <= 0.125 && 0.125 <= e.ci95_high) ++covered;
  }
  EXPECT_GE(covered, 90);
  EXPECT_LE(covered, 100);
}

TEST(EstimateLogUtility, InsiderInformationNeverHurts) {
  struct Case {
    EpsilonSchedule schedule;
    double delta;
  };
  const std::vector<Case> cases{{EpsilonSchedule::power_law(0.5, 1.0), 1e-2},
                                {EpsilonSchedule::constant(1.0, 1.0), 1e-2},
                                {EpsilonSchedule::power_law(1.0, 1.0), 1e-1},
                                {EpsilonSchedule::affine_below(0.5, 1.0), 1e-1}};
  for (const auto& c : cases) {
    auto insider = small_config(Strategy::insider(c.schedule), c.schedule, 4000);
    insider.delta = c.delta;
    insider.base_points = 4096;
    auto honest = small_config(Strategy::honest(), c.schedule, 4000);
    honest.delta = c.delta;
    honest.base_points = 4096;
    honest.antithetic = false;
    const McEstimate a = estimate_log_utility(insider);
    const McEstimate b = estimate_log_utility(honest);
    EXPECT_GE(a.mean, b.mean - 3.0 * std::hypot(a.std_error, b.std_error)) << c.schedule.literal();
  }
}

TEST(DualityCheck, ConstantLookAheadAndTerminalValue) {
  const auto look_ahead = duality_check(DualityKind::ConstantLookAhead, 1.0, 20000, 256, 42, {.threads = 1});
  EXPECT_EQ(look_ahead.analytic, 1.0);
  EXPECT_NEAR(look_ahead.mc.mean, 1.0, 3.0 * look_ahead.mc.std_error);

  const auto terminal = duality_check(DualityKind::TerminalValue, 1.0, 20000, 256, 42, {.threads = 1});
  EXPECT_EQ(terminal.analytic, 1.0);
  EXPECT_NEAR(terminal.mc.mean, 1.0, 3.0 * terminal.mc.std_error);

  const auto adapted =
      duality_check(DualityKind::Adapted, 1.0, 20000, 256, 42, {.antithetic = false, .threads = 1});
  EXPECT_EQ(adapted.analytic, 0.0);
  EXPECT_NEAR(adapted.mc.mean, 0.0, 3.0 * adapted.mc.std_error);
}

TEST(DualityCheck, HorizonScalesTheAnalyticValue) {
  const auto r = duality_check(DualityKind::TerminalValue, 2.5, 20000, 256, 3, {.threads = 1});
  EXPECT_EQ(r.analytic, 2.5);
  EXPECT_NEAR(r.mc.mean, 2.5, 3.0 * r.mc.std_error);
}

TEST(BridgeDriftRegression, SlopeIsLagRatio) {
  for (double ratio : {0.25, 0.5}) {
    const auto r = bridge_drift_regression(0.3, 0.4, ratio * 0.4, 100000, 42, 1);
    EXPECT_DOUBLE_EQ(r.expected, ratio);
    EXPECT_NEAR(r.slope, ratio, 3.0 * r.std_error) << ratio;
  }
  const auto same = bridge_drift_regression(0.3, 0.4, 0.4, 1000, 42, 1);
  EXPECT_DOUBLE_EQ(same.slope, 1.0);
  const auto tiny = bridge_drift_regression(0.3, 0.4, 1e-6, 100000, 42, 1);
  EXPECT_NEAR(tiny.slope, 0.0, 3.0 * tiny.std_error + 1e-5);
  EXPECT_THROW(bridge_drift_regression(0.3, 0.4, 0.5, 1000, 42, 1), DomainError);
  EXPECT_THROW(bridge_drift_regression(0.3, 0.4, 0.0, 1000, 42, 1), DomainError);
}

TEST(MartingaleGapCheck, SlopeIsOneBeyondTheLookAhead) {
  for (double ratio : {1.0, 2.0, 10.0}) {
    const auto r = martingale_gap_check(0.1, 0.05, ratio * 0.05, 100000, 7, 1);
    EXPECT_EQ(r.expected, 1.0);
    EXPECT_NEAR(r.slope, 1.0, 3.0 * r.std_error + 1e-15) << ratio;
  }
  EXPECT_THROW(martingale_gap_check(0.1, 0.05, 0.01, 1000, 7, 1), DomainError);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  std::vector<int> hits(100, 0);
  try {
    detail::parallel_for(100, 4, [&](std::size_t i) {
      hits[i] = 1;
      if (i == 30 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "30");
  }
  // Four blocks of 25; a failing block stops, the others run to completion.
  EXPECT_EQ(hits[0], 1);
  EXPECT_EQ(hits[31], 0);
  EXPECT_EQ(hits[74], 1);
  EXPECT_EQ(hits[81], 0);
}

}  // namespace
}  // namespace insider
