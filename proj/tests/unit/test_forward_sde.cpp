#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "insider_lab/brownian.hpp"
#include "insider_lab/errors.hpp"
#include "insider_lab/forward_sde.hpp"
#include "insider_lab/market.hpp"
#include "insider_lab/rng.hpp"
#include "insider_lab/strategy.hpp"
#include "support/oracles.hpp"

namespace insider {
namespace {

std::vector<std::size_t> all_nodes(const TimeGrid& g) {
  std::vector<std::size_t> idx(g.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

class ForwardIntegral : public ::testing::Test {
 protected:
  std::shared_ptr<const TimeGrid> grid = std::make_shared<const TimeGrid>(base_points(257, 1.0, 0.0));
  BrownianPath path = sample_path(grid, 2718);
  std::vector<std::size_t> nodes = all_nodes(*grid);
};

TEST_F(ForwardIntegral, ZeroIntegrandGivesZero) {
  const std::vector<double> phi(nodes.size() - 1, 0.0);
  EXPECT_EQ(forward_integral(phi, path, nodes), 0.0);
}

TEST_F(ForwardIntegral, UnitIntegrandTelescopesToTerminalValue) {
  const std::vector<double> phi(nodes.size() - 1, 1.0);
  EXPECT_NEAR(forward_integral(phi, path, nodes), path.values().back(), 1e-12);
}

TEST_F(ForwardIntegral, RandomConstantFactorPullsOut) {
  std::vector<double> psi(nodes.size() - 1);
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] = std::sin(3.0 * (*grid)[j]) + 0.2;
  const double base = forward_integral(psi, path, nodes);
  // G = B(T) is anticipating and the same for every left endpoint.
  const double g = path.values().back();
  std::vector<double> scaled(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) scaled[j] = g * psi[j];
  EXPECT_NEAR(forward_integral(scaled, path, nodes), g * base, 1e-13 * std::max(1.0, std::abs(g * base)));
  // Binary scalings commute with rounding, so the identity is then bitwise.
  for (std::size_t j = 0; j < psi.size(); ++j) scaled[j] = 0.25 * psi[j];
  EXPECT_EQ(forward_integral(scaled, path, nodes), 0.25 * base);
}

TEST_F(ForwardIntegral, ItoEntryPointIsTheSameSum) {
  std::vector<double> phi(nodes.size() - 1);
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = path[j] * path[j] - (*grid)[j];
  EXPECT_EQ(ito_integral(phi, path, nodes), forward_integral(phi, path, nodes));
}

TEST_F(ForwardIntegral, UsesLeftEndpointsOnSubgrid) {
  const std::vector<std::size_t> sub{0, 64, 128, 256};
  const std::vector<double> phi{1.0, 2.0, -1.0};
  const double expected = 1.0 * (path[64] - path[0]) + 2.0 * (path[128] - path[64]) - (path[256] - path[128]);
  EXPECT_EQ(forward_integral(phi, path, sub), expected);
}

TEST_F(ForwardIntegral, RejectsLengthMismatch) {
  const std::vector<double> phi(nodes.size(), 1.0);
  EXPECT_THROW(forward_integral(phi, path, nodes), ValidationError);
}

TEST(LogWealth, ZeroFractionKeepsInitialWealth) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(base_points(512, 1.0, 0.0));
  const auto sample = log_wealth(m, Strategy::table({{0.0, 0.0}}), sample_path(grid, 1), 0.0);
  EXPECT_EQ(sample.log_wealth, 0.0);
  EXPECT_EQ(sample.horizon, 1.0);
}

TEST(LogWealth, UnitFractionIsGeometricBrownianMotion) {
  const auto m = MarketCoefficients::constant(0.0, 1.0, 1.0);
  const double delta = 0.1;
  const auto grid = std::make_shared<const TimeGrid>(base_points(1024, 1.0, delta));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto path = sample_path(grid, seed);
    const auto sample = log_wealth(m, Strategy::table({{0.0, 1.0}}), path, delta);
    EXPECT_NEAR(sample.log_wealth, path.value_at(0.9) - 0.45, 1e-12);
    EXPECT_DOUBLE_EQ(sample.horizon, 0.9);
  }
}

TEST(LogWealth, DecompositionIsExact) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(union_grid(1024, s, 1e-2));
  for (const auto& strategy : {Strategy::honest(), Strategy::insider(s), Strategy::table({{0.0, 3.0}, {0.5, -1.0}})}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto sample = log_wealth(m, strategy, sample_path(grid, seed), 1e-2);
      EXPECT_EQ(sample.log_wealth, sample.stochastic_part + sample.drift_part) << strategy.name();
    }
  }
}

TEST(LogWealth, InsiderHandComputedOnTinyGrid) {
  // Constant look-ahead 0.5 on base {0, 0.5, 1}: pi_j = a + (B(t_j + 0.5) - B(t_j)) / (beta * 0.5).
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::constant(0.5, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(union_grid(3, s, 0.0));
  const BrownianPath path(grid, {0.0, 0.3, -0.1, 0.2}, 0);
  const auto sample = log_wealth(m, Strategy::insider(s), path, 0.0, {.pi_cap = std::nullopt, .enforce_tail_gap = false});

  const double a = 0.1, b = 0.2;
  const double pi0 = a / (b * b) + (0.3 - 0.0) / (b * 0.5);
  const double pi1 = a / (b * b) + (-0.1 - 0.3) / (b * 0.5);
  const double stochastic = pi0 * b * 0.3 + pi1 * b * (-0.4);
  const double drift = (pi0 * a - 0.5 * pi0 * pi0 * b * b) * 0.5 + (pi1 * a - 0.5 * pi1 * pi1 * b * b) * 0.5;
  EXPECT_NEAR(sample.stochastic_part, stochastic, 1e-14);
  EXPECT_NEAR(sample.drift_part, drift, 1e-14);
}

TEST(LogWealth, InsiderRequiresAnchorsOnTheGrid) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const auto plain = std::make_shared<const TimeGrid>(base_points(1024, 1.0, 1e-2));
  EXPECT_THROW(log_wealth(m, Strategy::insider(s), sample_path(plain, 1), 1e-2), DomainError);
}

TEST(LogWealth, EnforcesTailGapRule) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(1.0, 1.0);
  const auto coarse = std::make_shared<const TimeGrid>(union_grid(256, s, 1e-3));
  EXPECT_THROW(WealthPlan(m, Strategy::insider(s), coarse, 1e-3), ValidationError);
  const auto fine = std::make_shared<const TimeGrid>(union_grid(4096, s, 1e-2));
  EXPECT_NO_THROW(WealthPlan(m, Strategy::insider(s), fine, 1e-2));
  // Adapted strategies are not subject to the rule.
  EXPECT_NO_THROW(WealthPlan(m, Strategy::honest(), coarse, 1e-3));
}

TEST(LogWealth, TruncatedHorizonMustBeANode) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(base_points(512, 1.0, 0.0));
  EXPECT_THROW(WealthPlan(m, Strategy::honest(), grid, 0.123456789), ValidationError);
}

TEST(LogWealth, OptionalCapClipsFractions) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(base_points(256, 1.0, 0.0));
  const auto path = sample_path(grid, 4);
  const auto capped = log_wealth(m, Strategy::table({{0.0, 5.0}, {0.5, -7.0}}), path, 0.0, {.pi_cap = 2.0});
  const auto reference = log_wealth(m, Strategy::table({{0.0, 2.0}, {0.5, -2.0}}), path, 0.0);
  EXPECT_EQ(capped.log_wealth, reference.log_wealth);
}

TEST(LogWealth, TraceHasOneRowPerEvaluationNode) {
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const auto grid = std::make_shared<const TimeGrid>(union_grid(1024, s, 1e-1));
  const auto path = sample_path(grid, 9);
  const WealthPlan plan(m, Strategy::insider(s), grid, 1e-1);
  std::ostringstream out;
  plan.write_trace(out, path);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("t,pi,logX\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), plan.subgrid().size() + 1);
  const auto last_line = text.substr(text.rfind('\n', text.size() - 2) + 1);
  const double last_logx = std::stod(last_line.substr(last_line.rfind(',') + 1));
  EXPECT_NEAR(last_logx, plan.evaluate(path).log_wealth, 1e-12);
}

TEST(LogWealth, InsiderMeanIsTheLeftPointSumOfTheTheoryIntegrand) {
  // With every anchor beyond the next node, E[pi dB] = dt / (beta eps) and
  // E[pi^2] = (alpha / beta^2)^2 + 1 / (beta^2 eps), so the expected log-wealth is
  // sum_j (1 / eps_j + (alpha / beta)^2) dt_j / 2 on the evaluation subgrid.
  const auto m = MarketCoefficients::constant(0.1, 0.2, 1.0);
  const auto s = EpsilonSchedule::power_law(0.5, 1.0);
  const double delta = 0.1;
  const auto grid = std::make_shared<const TimeGrid>(union_grid(32, s, delta));
  const WealthPlan plan(m, Strategy::insider(s), grid, delta, {.pi_cap = std::nullopt, .enforce_tail_gap = false});
  const auto nodes = plan.subgrid();
  double riemann = 0.0;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double t = (*grid)[nodes[j]];
    const double dt = (*grid)[nodes[j + 1]] - t;
    ASSERT_LE(dt, s(t));
    riemann += 0.5 * (1.0 / s(t) + 0.25) * dt;
  }
  testing::Moments moments;
  for (std::uint64_t k = 0; k < 200000; ++k) {
    moments.add(plan.evaluate(sample_path(grid, derive_seed(5, k))).log_wealth);
  }
  const double se = std::sqrt(moments.variance() / static_cast<double>(moments.n));
  const double theory = 0.5 * (2.0 - 2.0 * std::sqrt(delta) + 0.25 * (1.0 - delta));
  EXPECT_NEAR(moments.mean, riemann, 3.0 * se);
  // The coarse grid's bias is far outside the noise, so the check has power.
  EXPECT_GT(std::abs(riemann - theory), 6.0 * se);
}

}  // namespace
}  // namespace insider
