#include "insider_lab/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "insider_lab/errors.hpp"

namespace insider::quadrature {
namespace {

struct Recursion {
  const std::function<double(double)>& f;
  int max_depth;
  bool converged = true;
  long evaluations = 0;
  double error = 0.0;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  // Simpson estimate `whole` on [a, b] with endpoint and midpoint values.
  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    // No representable midpoint left, or out of depth.
    if (depth >= max_depth || lm <= a || rm >= b) {
      converged = false;
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

SimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               SimpsonOptions options) {
  SimpsonResult result;
  if (a == b) return result;
  Recursion r{f, options.max_depth};
  const double fa = r.eval(a);
  const double fb = r.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = r.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  result.value = r.refine(a, b, fa, fm, fb, whole, options.tolerance, 0);
  result.error_estimate = r.error;
  result.converged = r.converged && std::isfinite(result.value);
  result.evaluations = r.evaluations;
  return result;
}

double integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                        SimpsonOptions options) {
  if (edges.size() < 2) return 0.0;
  const auto panels = static_cast<double>(edges.size() - 1);
  SimpsonOptions per_panel = options;
  per_panel.tolerance = options.tolerance / panels;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const SimpsonResult piece = adaptive_simpson(f, edges[i], edges[i + 1], per_panel);
    if (!piece.converged) {
      std::ostringstream msg;
      msg << "adaptive Simpson did not converge on [" << edges[i] << ", " << edges[i + 1]
          << "] within depth " << options.max_depth;
      throw QuadratureError(msg.str(), total + piece.value);
    }
    total += piece.value;
  }
  return total;
}

}  // namespace insider::quadrature
