#include "s3o/pathfinding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace s3o {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
const int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

// Distances are tracked as (straight, diagonal) step counts and converted
// once at the end. Distinct step-count pairs are never cost-ties (sqrt(2)
// is irrational), so A* and any independent Dijkstra agree bit-for-bit.
struct StepCount {
  int straight = 0;
  int diagonal = 0;
  double cost() const { return straight + diagonal * M_SQRT2; }
};

struct OpenEntry {
  double f;
  int idx;
  bool operator>(const OpenEntry& other) const { return f > other.f; }
};

void check_endpoint(const OccupancyGrid& occ, Cell c, const char* which) {
  if (!occ.in_bounds(c))
    throw std::invalid_argument(std::string("path_length: ") + which + " cell out of map");
  if (occ.at(c))
    throw std::invalid_argument(std::string("path_length: ") + which + " cell is blocked");
}

double octile(Cell a, Cell b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (M_SQRT2 - 1.0) * std::min(dx, dy);
}

}  // namespace

std::optional<double> path_length_cells(const OccupancyGrid& occ, double resolution,
                                        Cell from, Cell to) {
  check_endpoint(occ, from, "from");
  check_endpoint(occ, to, "to");
  if (from == to) return 0.0;

  const int n = static_cast<int>(occ.size());
  std::vector<double> g(n, kInf);
  std::vector<StepCount> steps(n);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  const int start = occ.index(from);
  const int goal = occ.index(to);
  g[start] = 0.0;
  open.push({octile(from, to), start});

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    if (idx == goal) return steps[goal].cost() * resolution;
    const Cell c = occ.cell_of(idx);
    if (f > g[idx] + octile(c, to) + 1e-12) continue;  // stale entry
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.x + kDx[k], c.y + kDy[k]};
      if (!occ.in_bounds(nb) || occ.at(nb)) continue;
      const bool diag = k >= 4;
      const double ng = g[idx] + (diag ? M_SQRT2 : 1.0);
      const int nidx = occ.index(nb);
      if (ng < g[nidx]) {
        g[nidx] = ng;
        steps[nidx] = steps[idx];
        (diag ? steps[nidx].diagonal : steps[nidx].straight) += 1;
        open.push({ng + octile(nb, to), nidx});
      }
    }
  }
  return std::nullopt;
}

std::optional<double> path_length(const OccupancyGrid& occ, double resolution,
                                  const Pose2D& from, const Pose2D& to) {
  const auto to_cell = [&](const Pose2D& p) {
    return Cell{static_cast<int>(std::floor(p.x / resolution)),
                static_cast<int>(std::floor(p.y / resolution))};
  };
  return path_length_cells(occ, resolution, to_cell(from), to_cell(to));
}

Grid<double> dijkstra_field(const OccupancyGrid& occ, double resolution, Cell source) {
  check_endpoint(occ, source, "source");
  const int n = static_cast<int>(occ.size());
  Grid<double> dist(occ.width(), occ.height(), kInf);
  std::vector<StepCount> steps(n);
  std::vector<double> g(n, kInf);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  const int start = occ.index(source);
  g[start] = 0.0;
  dist[start] = 0.0;
  open.push({0.0, start});

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    if (f > g[idx] + 1e-12) continue;
    const Cell c = occ.cell_of(idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.x + kDx[k], c.y + kDy[k]};
      if (!occ.in_bounds(nb) || occ.at(nb)) continue;
      const bool diag = k >= 4;
      const double ng = g[idx] + (diag ? M_SQRT2 : 1.0);
      const int nidx = occ.index(nb);
      if (ng < g[nidx]) {
        g[nidx] = ng;
        steps[nidx] = steps[idx];
        (diag ? steps[nidx].diagonal : steps[nidx].straight) += 1;
        dist[nidx] = steps[nidx].cost() * resolution;
        open.push({ng, nidx});
      }
    }
  }
  return dist;
}

PathCache::PathCache(const OccupancyGrid& occ, double resolution)
    : occ_(occ), resolution_(resolution) {}

void PathCache::add_source_field(Cell source) {
  const int idx = occ_.index(source);
  if (!fields_.count(idx)) fields_.emplace(idx, dijkstra_field(occ_, resolution_, source));
}

std::optional<double> PathCache::length(Cell from, Cell to) {
  check_endpoint(occ_, from, "from");
  check_endpoint(occ_, to, "to");
  if (from == to) return 0.0;

  for (const auto& [src, field] : fields_) {
    if (src == occ_.index(from) || src == occ_.index(to)) {
      const double d = field[src == occ_.index(from) ? occ_.index(to) : occ_.index(from)];
      if (std::isinf(d)) return std::nullopt;
      return d;
    }
  }

  int a = occ_.index(from), b = occ_.index(to);
  if (a > b) std::swap(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  {
    std::lock_guard<std::mutex> lock(pair_mutex_);
    if (const auto it = pair_cache_.find(key); it != pair_cache_.end()) {
      if (std::isinf(it->second)) return std::nullopt;
      return it->second;
    }
  }
  // Search outside the lock; a racing duplicate computes the same value.
  const auto len = path_length_cells(occ_, resolution_, from, to);
  {
    std::lock_guard<std::mutex> lock(pair_mutex_);
    pair_cache_[key] = len.value_or(kInf);
  }
  return len;
}

}  // namespace s3o
