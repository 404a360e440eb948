#pragma once

// Shared scene builders and independent oracles for the test suite. The
// oracles deliberately re-derive results with different algorithms or
// brute force so they cannot share bugs with the library code.

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "s3o/world.hpp"

namespace s3o::testing {

// Empty map (walls optional) at the given resolution with no objects.
inline Scenario open_scenario(int width_cells, int height_cells, double resolution,
                              bool walls = false) {
  Scenario s;
  s.map.width_cells = width_cells;
  s.map.height_cells = height_cells;
  s.map.resolution = resolution;
  s.map.inflation_radius = 0.0;
  s.map.static_occupancy = OccupancyGrid(width_cells, height_cells, 0);
  if (walls) {
    for (int x = 0; x < width_cells; ++x) {
      s.map.static_occupancy.at(x, 0) = 1;
      s.map.static_occupancy.at(x, height_cells - 1) = 1;
    }
    for (int y = 0; y < height_cells; ++y) {
      s.map.static_occupancy.at(0, y) = 1;
      s.map.static_occupancy.at(width_cells - 1, y) = 1;
    }
  }
  s.robot_start = {width_cells * resolution / 2.0, height_cells * resolution / 2.0};
  return s;
}

inline void add_object(Scenario& s, double x, double y) {
  ObjectState object;
  object.id = static_cast<int>(s.objects.size());
  object.position = {x, y};
  s.objects.push_back(object);
}

// Plain double-accumulating Dijkstra over the 8-connected grid; a different
// algorithm and arithmetic order than the library's step-counting search.
inline double oracle_shortest_path(const OccupancyGrid& occ, double resolution, Cell from,
                                   Cell to) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(occ.size(), kInf);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[occ.index(from)] = 0.0;
  queue.push({0.0, occ.index(from)});
  const int goal = occ.index(to);
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    if (d > dist[idx]) continue;
    if (idx == goal) return d;
    const Cell c = occ.cell_of(idx);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.x + dx, c.y + dy};
        if (!occ.in_bounds(nb) || occ.at(nb)) continue;
        const double step = (dx != 0 && dy != 0) ? resolution * std::sqrt(2.0) : resolution;
        if (d + step < dist[occ.index(nb)]) {
          dist[occ.index(nb)] = d + step;
          queue.push({d + step, occ.index(nb)});
        }
      }
  }
  return kInf;
}

}  // namespace s3o::testing
