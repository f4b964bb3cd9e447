#pragma once

// Conditional Donsker delta of Y = (B(t + eps1), B(t + eps2)) given F_t and
// its Hida-Malliavin derivative, in closed form.
//
// Conditioned on B(t) = b, the conditional Donsker delta is the joint density
//   N(y1; b, eps1) * N(y2; y1, eps2 - eps1)
// and E[D_{t+} delta_Y(y) | F_t] is that density times (y1 - b) / eps1.
// Neither depends on the second signal once the ratio is taken, which is why
// the optimal portfolio uses only B(t + eps1).

namespace insider {

/// Values below this are returned as exactly 0.
inline constexpr double kDensityFloor = 1e-300;

class DonskerParams {
 public:
  /// Throws DomainError unless 0 < eps1 < eps2.
  DonskerParams(double b, double eps1, double eps2);

  double b() const noexcept { return b_; }
  double eps1() const noexcept { return eps1_; }
  double eps2() const noexcept { return eps2_; }

 private:
  double b_;
  double eps1_;
  double eps2_;
};

/// log of cond_delta_2d, finite for all finite inputs.
double log_cond_delta_2d(const DonskerParams& p, double y1, double y2);

double cond_delta_2d(const DonskerParams& p, double y1, double y2);

double cond_delta_deriv_2d(const DonskerParams& p, double y1, double y2);

/// (y1 - b) / eps1, the reduced ratio E[D delta | F_t] / E[delta | F_t].
double malliavin_ratio(double b, double y1, double eps1);

/// Normal density with mean b and variance eps.
double cond_delta_1d(double b, double y, double eps);

}  // namespace insider
