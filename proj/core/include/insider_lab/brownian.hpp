#pragma once

// Exact Brownian trajectories on finite grids.
//
// Grids built by union_grid contain every time the insider strategy queries:
// the base evaluation points t_j on [0, T - delta] and the look-ahead anchors
// t_j + eps_{t_j}. Paths are never interpolated.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "insider_lab/schedules.hpp"

namespace insider {

/// Two grid times closer than this are the same node.
inline constexpr double kMergeTolerance = 1e-12;

class TimeGrid {
 public:
  /// points must start at 0 and be strictly increasing with gaps <= max_step.
  /// evaluation_nodes are the indices used as left endpoints by integrals;
  /// empty means every node.
  explicit TimeGrid(std::vector<double> points,
                    std::vector<std::size_t> evaluation_nodes = {},
                    double max_step = std::numeric_limits<double>::infinity());

  std::span<const double> points() const noexcept { return points_; }
  std::span<const std::size_t> evaluation_nodes() const noexcept { return evaluation_nodes_; }
  /// sqrt(points[i+1] - points[i]), one entry per gap.
  std::span<const double> sqrt_gaps() const noexcept { return sqrt_gaps_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double max_horizon() const noexcept { return points_.back(); }

  /// Index of the node within kMergeTolerance of t, if any.
  std::optional<std::size_t> find(double t) const noexcept;

  /// As find, but throws DomainError naming t when it is not a node.
  std::size_t index_of(double t) const;

 private:
  std::vector<double> points_;
  std::vector<std::size_t> evaluation_nodes_;
  std::vector<double> sqrt_gaps_;
};

/// Base evaluation points on [0, T - delta]: uniform on [0, T - 10 delta] and
/// ten times denser on [T - 10 delta, T - delta]. A single uniform block when
/// delta = 0 or T - 10 delta <= 0.
std::vector<double> base_points(std::size_t count, double horizon, double delta);

/// Largest gap of the refined tail block of base_points(count, horizon, delta).
double tail_gap(std::span<const double> base, double horizon, double delta);

/// Sorted union of the base points with the anchors t_j + eps_{t_j}, merged at
/// kMergeTolerance. Evaluation nodes are the base points. Throws
/// ValidationError for Mixed-regime schedules other than constants.
TimeGrid union_grid(std::size_t base_points, const EpsilonSchedule& schedule, double delta);

class BrownianPath {
 public:
  BrownianPath(std::shared_ptr<const TimeGrid> grid, std::vector<double> values, std::uint64_t seed);

  const TimeGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const TimeGrid>& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Stored B(t); throws DomainError when t is not a grid node.
  double value_at(double t) const;

  /// The path driven by the negated increments.
  BrownianPath antithetic() const;

 private:
  std::shared_ptr<const TimeGrid> grid_;
  std::vector<double> values_;
  std::uint64_t seed_;
};

/// Cumulative sum of independent N(0, gap) increments drawn from
/// NormalStream(seed) in grid order.
BrownianPath sample_path(std::shared_ptr<const TimeGrid> grid, std::uint64_t seed);
BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed);

/// CSV with header "t,B".
void write_path_csv(std::ostream& out, const BrownianPath& path);

}  // namespace insider
