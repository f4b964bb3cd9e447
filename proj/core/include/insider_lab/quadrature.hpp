#pragma once

#include <functional>
#include <span>

namespace insider::quadrature {

struct SimpsonOptions {
  double tolerance = 1e-9;
  int max_depth = 40;
};

struct SimpsonResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  long evaluations = 0;
};

/// Adaptive Simpson with Richardson correction on [a, b].
/// Never throws; `converged` is false when some sub-interval hit max_depth.
SimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               SimpsonOptions options = {});

/// Integrates over consecutive panels [edges[i], edges[i+1]], splitting the
/// tolerance in proportion to panel count. Throws QuadratureError carrying
/// the partial sum if any panel fails to converge.
double integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                        SimpsonOptions options = {});

}  // namespace insider::quadrature
