#include "insider_lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "insider_lab/errors.hpp"
#include "text_util.hpp"

namespace insider {

double theoretical_utility(const MarketCoefficients& m, const EpsilonSchedule& s, double delta) {
  const double horizon = m.horizon();
  if (s.horizon() != horizon) throw ValidationError("schedule horizon differs from the market horizon");
  if (!(delta >= 0.0 && delta < horizon)) {
    throw DomainError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  if (delta == 0.0) {
    const ViabilityReport report = classify_viability(s);
    if (report.classification != Classification::Viable) {
      throw DomainError("the maximal expected log-utility is infinite at T for " + s.literal() + " (" +
                        to_string(report.classification) + "); evaluate at T - delta with delta > 0");
    }
  }
  const auto closed = analytic_viability_integral(s, delta);
  const double inverse = closed ? *closed : viability_integral(s, delta);
  return 0.5 * (inverse + m.sharpe_squared_integral(0.0, horizon - delta));
}

double merton_utility(const MarketCoefficients& m, double delta) {
  if (!(delta >= 0.0 && delta < m.horizon())) {
    throw DomainError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  return 0.5 * m.sharpe_squared_integral(0.0, m.horizon() - delta);
}

double strategy_theory(const MarketCoefficients& m, const EpsilonSchedule& s, const Strategy& strategy,
                       double delta) {
  if (strategy.anticipating()) return theoretical_utility(m, s, delta);
  const auto* table = std::get_if<CustomTable>(&strategy.kind());
  if (!table) return merton_utility(m, delta);

  if (!(delta >= 0.0 && delta < m.horizon())) {
    throw DomainError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  const double end = m.horizon() - delta;
  std::vector<double> pts = m.breakpoints(0.0, end);
  for (const auto& k : table->knots) {
    if (k.t > 0.0 && k.t < end) pts.push_back(k.t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double t = pts[i];
    const double pi = table_fraction(*table, t);
    const double beta = m.beta(t);
    total += (pi * m.alpha(t) - 0.5 * pi * pi * beta * beta) * (pts[i + 1] - t);
  }
  return total;
}

ComparisonReport make_report(double theory, const McEstimate& mc, double delta, double abs_tol) {
  const double diff = mc.mean - theory;
  double z = 0.0;
  if (mc.std_error > 0.0) {
    z = diff / mc.std_error;
  } else if (diff != 0.0) {
    z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  const bool pass = std::abs(diff) <= std::max(3.0 * mc.std_error, abs_tol);
  return {theory, mc, z, pass ? Verdict::Pass : Verdict::Fail, delta, abs_tol};
}

ComparisonReport compare(const ExperimentConfig& cfg, double abs_tol) {
  validate(cfg);
  const double theory = strategy_theory(cfg.market, cfg.schedule, cfg.strategy, cfg.delta);
  return make_report(theory, estimate_log_utility(cfg), cfg.delta, abs_tol);
}

std::vector<ComparisonReport> truncation_sweep(const ExperimentConfig& cfg, std::span<const double> deltas,
                                               double abs_tol) {
  if (deltas.empty()) throw ValidationError("sweep needs at least one delta");
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] < deltas[i - 1])) throw ValidationError("sweep deltas must be strictly decreasing");
  }
  std::vector<ComparisonReport> reports;
  reports.reserve(deltas.size());
  for (double d : deltas) {
    ExperimentConfig at = cfg;
    at.delta = d;
    reports.push_back(compare(at, abs_tol));
  }
  return reports;
}

void write_sweep_csv(std::ostream& out, std::span<const ComparisonReport> reports) {
  out << "delta,theory,mc_mean,mc_stderr,z,verdict\n";
  for (const auto& r : reports) {
    out << detail::format_double(r.delta) << ',' << detail::format_double(r.theory) << ','
        << detail::format_double(r.mc.mean) << ',' << detail::format_double(r.mc.std_error) << ','
        << detail::format_double(r.z_score) << ',' << to_string(r.verdict) << '\n';
  }
}

std::string to_string(Verdict verdict) { return verdict == Verdict::Pass ? "Pass" : "Fail"; }

}  // namespace insider
