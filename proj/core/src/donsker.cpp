#include "insider_lab/donsker.hpp"

#include <cmath>
#include <numbers>

#include "insider_lab/errors.hpp"
#include "text_util.hpp"

namespace insider {
namespace {

double floor_density(double log_value) {
  const double v = std::exp(log_value);
  return v < kDensityFloor ? 0.0 : v;
}

}  // namespace

DonskerParams::DonskerParams(double b, double eps1, double eps2) : b_(b), eps1_(eps1), eps2_(eps2) {
  if (!std::isfinite(b)) throw DomainError("Donsker parameter b must be finite");
  if (!(eps1 > 0.0)) throw DomainError("eps1 must be > 0, got " + detail::format_double(eps1));
  if (!(eps2 > eps1)) {
    throw DomainError("eps2 must exceed eps1 for an invertible covariance (eps1=" +
                      detail::format_double(eps1) + ", eps2=" + detail::format_double(eps2) + ")");
  }
}

double log_cond_delta_2d(const DonskerParams& p, double y1, double y2) {
  const double gap = p.eps2() - p.eps1();
  const double d12 = y1 - y2;
  const double d1 = y1 - p.b();
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(p.eps1() * gap) - d12 * d12 / (2.0 * gap) -
         d1 * d1 / (2.0 * p.eps1());
}

double cond_delta_2d(const DonskerParams& p, double y1, double y2) {
  return floor_density(log_cond_delta_2d(p, y1, y2));
}

double cond_delta_deriv_2d(const DonskerParams& p, double y1, double y2) {
  return cond_delta_2d(p, y1, y2) * malliavin_ratio(p.b(), y1, p.eps1());
}

double malliavin_ratio(double b, double y1, double eps1) {
  if (!(eps1 > 0.0)) throw DomainError("eps1 must be > 0, got " + detail::format_double(eps1));
  return (y1 - b) / eps1;
}

double cond_delta_1d(double b, double y, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0, got " + detail::format_double(eps));
  const double d = y - b;
  return floor_density(-0.5 * std::log(2.0 * std::numbers::pi * eps) - d * d / (2.0 * eps));
}

}  // namespace insider
