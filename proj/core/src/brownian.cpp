#include "insider_lab/brownian.hpp"

#include <algorithm>
#include <cmath>

#include "insider_lab/errors.hpp"
#include "insider_lab/rng.hpp"
#include "text_util.hpp"

namespace insider {

TimeGrid::TimeGrid(std::vector<double> points, std::vector<std::size_t> evaluation_nodes,
                   double max_step)
    : points_(std::move(points)), evaluation_nodes_(std::move(evaluation_nodes)) {
  if (points_.empty() || points_.front() != 0.0) throw ValidationError("time grid must start at 0");
  sqrt_gaps_.reserve(points_.size() - 1);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double gap = points_[i] - points_[i - 1];
    sqrt_gaps_.push_back(std::sqrt(gap));
    if (!(gap > 0.0)) throw ValidationError("time grid must be strictly increasing");
    if (gap > max_step) {
      throw ValidationError("time grid gap " + detail::format_double(gap) + " exceeds max step " +
                            detail::format_double(max_step));
    }
  }
  if (evaluation_nodes_.empty()) {
    evaluation_nodes_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) evaluation_nodes_[i] = i;
  }
  for (std::size_t i = 0; i < evaluation_nodes_.size(); ++i) {
    if (evaluation_nodes_[i] >= points_.size() || (i > 0 && evaluation_nodes_[i] <= evaluation_nodes_[i - 1])) {
      throw ValidationError("evaluation nodes must be increasing grid indices");
    }
  }
}

std::optional<std::size_t> TimeGrid::find(double t) const noexcept {
  auto it = std::lower_bound(points_.begin(), points_.end(), t - kMergeTolerance);
  if (it != points_.end() && std::abs(*it - t) <= kMergeTolerance) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  return std::nullopt;
}

std::size_t TimeGrid::index_of(double t) const {
  if (auto i = find(t)) return *i;
  throw DomainError("time t=" + detail::format_double(t) + " is not a node of the path grid");
}

std::vector<double> base_points(std::size_t count, double horizon, double delta) {
  if (count < 2) throw ValidationError("base_points must be >= 2");
  if (!(horizon > 0.0)) throw ValidationError("horizon T must be > 0");
  if (!(delta >= 0.0 && delta < horizon)) {
    throw ValidationError("truncation delta=" + detail::format_double(delta) + " must lie in [0, T)");
  }
  const double end = horizon - delta;
  const double split = horizon - 10.0 * delta;
  const std::size_t intervals = count - 1;
  std::vector<double> pts;
  pts.reserve(count);
  if (delta == 0.0 || split <= 0.0 || intervals < 2) {
    for (std::size_t i = 0; i < intervals; ++i) pts.push_back(end * static_cast<double>(i) / intervals);
    pts.push_back(end);
    return pts;
  }
  // Tail spacing is a tenth of the body spacing.
  const double weighted = split + 10.0 * (end - split);
  auto n_body = static_cast<std::size_t>(std::llround(intervals * split / weighted));
  n_body = std::clamp<std::size_t>(n_body, 1, intervals - 1);
  const std::size_t n_tail = intervals - n_body;
  for (std::size_t i = 0; i < n_body; ++i) pts.push_back(split * static_cast<double>(i) / n_body);
  for (std::size_t k = 0; k < n_tail; ++k) {
    pts.push_back(split + (end - split) * static_cast<double>(k) / n_tail);
  }
  pts.push_back(end);
  return pts;
}

double tail_gap(std::span<const double> base, double horizon, double delta) {
  if (base.size() < 2) return 0.0;
  const double split = horizon - 10.0 * delta;
  double gap = 0.0;
  if (delta > 0.0) {
    for (std::size_t i = 1; i < base.size(); ++i) {
      if (base[i - 1] >= split - kMergeTolerance) gap = std::max(gap, base[i] - base[i - 1]);
    }
  }
  if (gap == 0.0) gap = base[base.size() - 1] - base[base.size() - 2];
  return gap;
}

TimeGrid union_grid(std::size_t count, const EpsilonSchedule& schedule, double delta) {
  if (!std::holds_alternative<Constant>(schedule.kind()) && regime(schedule) == Regime::Mixed) {
    throw ValidationError(schedule.literal() + " crosses the horizon; union grid needs a single regime");
  }
  const std::vector<double> base = base_points(count, schedule.horizon(), delta);
  std::vector<double> all = base;
  all.reserve(2 * base.size());
  for (double t : base) all.push_back(t + schedule.eval_closed(t));
  std::sort(all.begin(), all.end());

  std::vector<double> merged;
  merged.reserve(all.size());
  for (double t : all) {
    if (merged.empty() || t > merged.back() + kMergeTolerance) merged.push_back(t);
  }

  std::vector<std::size_t> nodes;
  nodes.reserve(base.size());
  for (double t : base) {
    auto it = std::lower_bound(merged.begin(), merged.end(), t - kMergeTolerance);
    nodes.push_back(static_cast<std::size_t>(it - merged.begin()));
  }
  return TimeGrid(std::move(merged), std::move(nodes));
}

BrownianPath::BrownianPath(std::shared_ptr<const TimeGrid> grid, std::vector<double> values,
                           std::uint64_t seed)
    : grid_(std::move(grid)), values_(std::move(values)), seed_(seed) {
  if (!grid_ || values_.size() != grid_->size()) {
    throw ValidationError("path values must match the grid size");
  }
  if (values_.front() != 0.0) throw ValidationError("Brownian path must start at B(0) = 0");
}

double BrownianPath::value_at(double t) const { return values_[grid_->index_of(t)]; }

BrownianPath BrownianPath::antithetic() const {
  std::vector<double> flipped(values_.size());
  // -0.0 would break the B(0) = 0 bit pattern in dumps.
  for (std::size_t i = 0; i < values_.size(); ++i) flipped[i] = 0.0 - values_[i];
  return BrownianPath(grid_, std::move(flipped), seed_);
}

BrownianPath sample_path(std::shared_ptr<const TimeGrid> grid, std::uint64_t seed) {
  const auto scale = grid->sqrt_gaps();
  std::vector<double> values(grid->size());
  NormalStream normal(seed);
  values[0] = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) values[i] = values[i - 1] + scale[i - 1] * normal();
  return BrownianPath(std::move(grid), std::move(values), seed);
}

BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed) {
  return sample_path(std::make_shared<const TimeGrid>(grid), seed);
}

void write_path_csv(std::ostream& out, const BrownianPath& path) {
  out << "t,B\n";
  const auto pts = path.grid().points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << detail::format_double(pts[i]) << ',' << detail::format_double(path[i]) << '\n';
  }
}

}  // namespace insider
