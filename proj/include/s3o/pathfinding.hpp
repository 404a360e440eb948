#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "s3o/geometry.hpp"
#include "s3o/grid.hpp"

namespace s3o {

// Shortest 8-connected grid path in meters (diagonal step = sqrt(2) * res),
// std::nullopt when the endpoints are disconnected. Both endpoints must be
// free cells; a blocked or out-of-map endpoint throws std::invalid_argument,
// which keeps "unreachable" distinct from "invalid query".
std::optional<double> path_length(const OccupancyGrid& occ, double resolution,
                                  const Pose2D& from, const Pose2D& to);

std::optional<double> path_length_cells(const OccupancyGrid& occ, double resolution,
                                        Cell from, Cell to);

// Full single-source shortest-path field; infinity marks unreachable cells.
Grid<double> dijkstra_field(const OccupancyGrid& occ, double resolution, Cell source);

// Memoizing wrapper for the many point-to-point queries one planning run
// makes against a fixed occupancy grid. Sources registered via
// add_source_field get a full distance field; everything else goes through
// A* with a symmetric pair cache.
class PathCache {
 public:
  PathCache(const OccupancyGrid& occ, double resolution);

  void add_source_field(Cell source);  // not thread-safe; call during setup

  // Same contract as path_length_cells. Safe to call from several threads
  // once the source fields are registered; cached values are pure functions
  // of the grid, so lookup order never changes a result.
  std::optional<double> length(Cell from, Cell to);

 private:
  const OccupancyGrid& occ_;
  double resolution_;
  std::unordered_map<int, Grid<double>> fields_;
  std::mutex pair_mutex_;
  std::unordered_map<std::uint64_t, double> pair_cache_;
};

}  // namespace s3o
