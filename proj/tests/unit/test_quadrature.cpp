#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "insider_lab/errors.hpp"
#include "insider_lab/quadrature.hpp"
#include "support/oracles.hpp"

namespace insider::quadrature {
namespace {

TEST(AdaptiveSimpson, IntegratesPolynomialsExactly) {
  const auto r = adaptive_simpson([](double x) { return 3.0 * x * x * x - x + 2.0; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 3.0 * (16.0 - 1.0) / 4.0 - (4.0 - 1.0) / 2.0 + 6.0, 1e-12);
}

TEST(AdaptiveSimpson, MeetsToleranceOnSmoothIntegrands) {
  const auto r = adaptive_simpson([](double x) { return std::exp(-x * x); }, 0.0, 3.0, {.tolerance = 1e-11});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * std::sqrt(std::numbers::pi) * std::erf(3.0), 1e-11);
  EXPECT_GT(r.evaluations, 5);
}

TEST(AdaptiveSimpson, ReportsNonConvergenceInsteadOfThrowing) {
  const auto r = adaptive_simpson([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0,
                                  {.tolerance = 1e-14, .max_depth = 6});
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(AdaptiveSimpson, AgreesWithGaussLegendreOracle) {
  const testing::GaussLegendre gl(64);
  for (double k : {0.5, 2.0, 7.0}) {
    auto f = [k](double x) { return std::cos(k * x) / (1.0 + x * x); };
    EXPECT_NEAR(adaptive_simpson(f, -2.0, 3.0).value, gl.integrate(f, -2.0, 3.0), 1e-9) << k;
  }
}

TEST(IntegratePanels, SumsPanelsOfSingularIntegrandTowardEndpoint) {
  std::vector<double> edges{0.0};
  for (int k = 1; k <= 30; ++k) edges.push_back(1.0 - std::pow(2.0, -k));
  const double value = integrate_panels([](double t) { return 1.0 / std::sqrt(1.0 - t); }, edges);
  EXPECT_NEAR(value, 2.0 - 2.0 * std::pow(2.0, -15.0), 1e-9);
}

TEST(IntegratePanels, CarriesPartialValueWhenAPanelFails) {
  const std::vector<double> edges{0.0, 0.5, 1.0};
  try {
    integrate_panels([](double x) { return x <= 0.5 ? 1.0 : std::sin(1.0 / (x - 0.5)); }, edges,
                     {.tolerance = 1e-14, .max_depth = 4});
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_NEAR(e.partial_value(), 0.5, 0.5);
  }
}

TEST(GaussLegendreOracle, WeightsSumToIntervalLength) {
  const testing::GaussLegendre gl(2048);
  double sum = 0.0;
  for (double w : gl.weights) sum += w;
  EXPECT_NEAR(sum, 2.0, 1e-12);
  EXPECT_NEAR(gl.integrate([](double x) { return std::exp(x); }, 0.0, 1.0), std::numbers::e - 1.0, 1e-13);
}

}  // namespace
}  // namespace insider::quadrature
