#include "insider_lab/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "insider_lab/donsker.hpp"
#include "insider_lab/errors.hpp"
#include "text_util.hpp"

namespace insider {
namespace {

using detail::Overloaded;

struct InsiderInputs {
  double eps;
  double b_now;
  double b_ahead;
};

InsiderInputs insider_inputs(const EpsilonSchedule& s, const BrownianPath& path, double t) {
  const double eps = s(t);
  const auto& grid = path.grid();
  const auto now = grid.find(t);
  if (!now) throw DomainError("evaluation time t=" + detail::format_double(t) + " is not a node of the path grid");
  const auto ahead = grid.find(t + eps);
  if (!ahead) {
    throw DomainError("look-ahead time t+eps_t=" + detail::format_double(t + eps) +
                      " is not a node of the path grid (t=" + detail::format_double(t) + ")");
  }
  return {eps, path[*now], path[*ahead]};
}

}  // namespace

Strategy::Strategy(Kind kind) : kind_(std::move(kind)) {
  if (const auto* table = std::get_if<CustomTable>(&kind_)) {
    const auto& k = table->knots;
    if (k.empty() || k.front().t != 0.0) throw ValidationError("strategy table must start at t=0");
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!std::isfinite(k[i].fraction) || !std::isfinite(k[i].t)) {
        throw ValidationError("strategy table entries must be finite");
      }
      if (i > 0 && !(k[i].t > k[i - 1].t)) {
        throw ValidationError("strategy table times must be strictly increasing");
      }
    }
  }
}

const EpsilonSchedule& Strategy::schedule() const {
  if (const auto* insider = std::get_if<InsiderOptimal>(&kind_)) return insider->schedule;
  throw ValidationError("strategy '" + name() + "' has no look-ahead schedule");
}

std::string Strategy::name() const {
  return std::visit(Overloaded{
                        [](const HonestMerton&) { return std::string("merton"); },
                        [](const InsiderOptimal&) { return std::string("insider"); },
                        [](const CustomTable&) { return std::string("table"); },
                    },
                    kind_);
}

double table_fraction(const CustomTable& table, double t) {
  const auto& k = table.knots;
  auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const FractionKnot& n) { return x < n.t; });
  if (it == k.begin()) return k.front().fraction;
  return (it - 1)->fraction;
}

double honest_merton(const MarketCoefficients& m, double t) {
  const double beta = m.beta(t);
  return m.alpha(t) / (beta * beta);
}

double insider_optimal(const MarketCoefficients& m, const EpsilonSchedule& s, const BrownianPath& path,
                       double t) {
  const auto in = insider_inputs(s, path, t);
  return insider_fraction(m.alpha(t), m.beta(t), in.eps, in.b_now, in.b_ahead);
}

double donsker_composed(const MarketCoefficients& m, const EpsilonSchedule& s, const BrownianPath& path,
                        double t) {
  const auto in = insider_inputs(s, path, t);
  const double beta = m.beta(t);
  return m.alpha(t) / (beta * beta) + malliavin_ratio(in.b_now, in.b_ahead, in.eps) / beta;
}

double donsker_composed_two_signal(const MarketCoefficients& m, const EpsilonSchedule& s,
                                   const BrownianPath& path, double t, double eps2, double y2) {
  const auto in = insider_inputs(s, path, t);
  const DonskerParams params(in.b_now, in.eps, eps2);
  const double density = cond_delta_2d(params, in.b_ahead, y2);
  // An underflowed density leaves only the limit of the ratio.
  const double ratio = density > 0.0 ? cond_delta_deriv_2d(params, in.b_ahead, y2) / density
                                     : malliavin_ratio(in.b_now, in.b_ahead, in.eps);
  const double beta = m.beta(t);
  return m.alpha(t) / (beta * beta) + ratio / beta;
}

double evaluate(const Strategy& strategy, const MarketCoefficients& m, const BrownianPath& path, double t) {
  return std::visit(Overloaded{
                        [&](const HonestMerton&) { return honest_merton(m, t); },
                        [&](const InsiderOptimal& ins) { return insider_optimal(m, ins.schedule, path, t); },
                        [&](const CustomTable& table) { return table_fraction(table, t); },
                    },
                    strategy.kind());
}

Strategy parse_strategy(std::string_view literal, const EpsilonSchedule& schedule) {
  const std::string_view text = detail::trim(literal);
  if (text == "merton") return Strategy::honest();
  if (text == "insider") return Strategy::insider(schedule);
  if (text.substr(0, 7) == "table:@" && text.size() > 7) {
    return Strategy::table(read_fraction_csv(std::string(text.substr(7))));
  }
  throw ValidationError("strategy: expected 'merton', 'insider' or 'table:@<file.csv>', got '" +
                        std::string(literal) + "'");
}

std::vector<FractionKnot> read_fraction_csv(const std::filesystem::path& path) {
  std::vector<FractionKnot> knots;
  for (const auto& [t, pi] : detail::read_two_column_csv(path, "t", "pi")) knots.push_back({t, pi});
  return knots;
}

}  // namespace insider
