#pragma once

#include <string>
#include <vector>

#include "s3o/geometry.hpp"
#include "s3o/grid.hpp"
#include "s3o/rng.hpp"
#include "s3o/world.hpp"

namespace s3o {

struct StateSpace;

// Reach kernel shape: zero below reach_min and above reach_max, full
// feasibility on [reach_full_lo, reach_full_hi], linear ramps between.
struct FeasibilityParams {
  double reach_max = 1.0;
  double reach_full_lo = 0.35;
  double reach_full_hi = 0.7;
  double reach_min = 0.3;
  int sample_count = 200;  // N samples behind the task-level estimate

  bool valid() const {
    return 0.0 <= reach_min && reach_min < reach_full_lo && reach_full_lo <= reach_full_hi &&
           reach_full_hi < reach_max && sample_count >= 1;
  }
};

// Per-object grid of motion-level feasibility values in [0, 1], aligned to
// the map cells.
struct FeasibilityField {
  int object_id = 0;
  Pose2D object_position;
  Grid<double> values;
};

// Motion-level feasibility of standing at y_r to pick an object at y_o.
// Deterministic analytic kernel: clearance(y_r) * reach(|y_r - y_o|).
// Out-of-map or blocked standing cells score 0.
double motion_feasibility(const Pose2D& y_r, const Pose2D& y_o, const OccupancyGrid& occ,
                          double resolution, const FeasibilityParams& params);

FeasibilityField build_field(const ObjectState& object, const OccupancyGrid& occ,
                             double resolution, const FeasibilityParams& params);

// Draws n standing positions within location l, each cell weighted by its
// field value. Throws EmptySupport when the location has zero total mass.
std::vector<Pose2D> sample_positions_smp(const FeasibilityField& field, const StateSpace& sym,
                                         int location, int n, Rng& rng);

// Task-level feasibility: mean field value over params.sample_count draws
// from sample_positions_smp. An all-infeasible location scores 0.0 instead
// of erroring so the state-space score stays total.
double task_feasibility(const FeasibilityField& field, const StateSpace& sym, int location,
                        const FeasibilityParams& params, Rng& rng);

// 8-bit binary PGM, 255 = feasibility 1.0.
void write_pgm(const Grid<double>& values, const std::string& path);

}  // namespace s3o
