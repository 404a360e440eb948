#include "s3o/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "s3o/errors.hpp"
#include "s3o/partition.hpp"

namespace s3o {

namespace {

// Trapezoid over reach distance: 0 outside [reach_min, reach_max], 1 on
// [reach_full_lo, reach_full_hi], linear ramps between.
double reach_profile(double d, const FeasibilityParams& p) {
  if (d <= p.reach_min || d >= p.reach_max) return 0.0;
  if (d < p.reach_full_lo) return (d - p.reach_min) / (p.reach_full_lo - p.reach_min);
  if (d <= p.reach_full_hi) return 1.0;
  return (p.reach_max - d) / (p.reach_max - p.reach_full_hi);
}

}  // namespace

double motion_feasibility(const Pose2D& y_r, const Pose2D& y_o, const OccupancyGrid& occ,
                          double resolution, const FeasibilityParams& params) {
  const Cell c{static_cast<int>(std::floor(y_r.x / resolution)),
               static_cast<int>(std::floor(y_r.y / resolution))};
  if (!occ.in_bounds(c) || occ.at(c)) return 0.0;
  return reach_profile(distance(y_r, y_o), params);
}

FeasibilityField build_field(const ObjectState& object, const OccupancyGrid& occ,
                             double resolution, const FeasibilityParams& params) {
  FeasibilityField field;
  field.object_id = object.id;
  field.object_position = object.position;
  field.values = Grid<double>(occ.width(), occ.height(), 0.0);

  // Only cells within reach_max of the object can be nonzero.
  const int x0 = std::max(0, static_cast<int>(std::floor((object.position.x - params.reach_max) / resolution)));
  const int y0 = std::max(0, static_cast<int>(std::floor((object.position.y - params.reach_max) / resolution)));
  const int x1 = std::min(occ.width() - 1,
                          static_cast<int>(std::floor((object.position.x + params.reach_max) / resolution)));
  const int y1 = std::min(occ.height() - 1,
                          static_cast<int>(std::floor((object.position.y + params.reach_max) / resolution)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      if (occ.at(x, y)) continue;
      const Pose2D center{(x + 0.5) * resolution, (y + 0.5) * resolution};
      field.values.at(x, y) = reach_profile(distance(center, object.position), params);
    }
  return field;
}

std::vector<Pose2D> sample_positions_smp(const FeasibilityField& field, const StateSpace& sym,
                                         int location, int n, Rng& rng) {
  if (location < 0 || location >= static_cast<int>(sym.locations.size()))
    throw EmptySupport("sample location index out of range");
  const auto& cells = sym.locations[location].cells;

  std::vector<double> cumulative;
  cumulative.reserve(cells.size());
  double total = 0.0;
  for (const Cell& c : cells) {
    total += field.values.at(c);
    cumulative.push_back(total);
  }
  if (total <= 0.0) throw EmptySupport("location has no feasible standing cell");

  std::vector<Pose2D> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double pick = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const size_t idx = std::min<size_t>(it - cumulative.begin(), cells.size() - 1);
    const Cell c = cells[idx];
    out.push_back({(c.x + 0.5) * sym.resolution, (c.y + 0.5) * sym.resolution});
  }
  return out;
}

double task_feasibility(const FeasibilityField& field, const StateSpace& sym, int location,
                        const FeasibilityParams& params, Rng& rng) {
  std::vector<Pose2D> samples;
  try {
    samples = sample_positions_smp(field, sym, location, params.sample_count, rng);
  } catch (const EmptySupport&) {
    return 0.0;
  }
  double sum = 0.0;
  for (const Pose2D& p : samples) {
    const Cell c{static_cast<int>(std::floor(p.x / sym.resolution)),
                 static_cast<int>(std::floor(p.y / sym.resolution))};
    sum += field.values.at(c);
  }
  return sum / static_cast<double>(samples.size());
}

void write_pgm(const Grid<double>& values, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image file: " + path);
  out << "P5\n" << values.width() << " " << values.height() << "\n255\n";
  for (int y = 0; y < values.height(); ++y)
    for (int x = 0; x < values.width(); ++x) {
      const double v = std::clamp(values.at(x, y), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<int>(std::lround(v * 255.0))));
    }
}

}  // namespace s3o
