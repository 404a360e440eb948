#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3o/geometry.hpp"
#include "s3o/grid.hpp"

namespace s3o {

// Prior navigation map: walls and tables only. Chairs are sensed at plan
// time and never appear here.
struct GridMap {
  int width_cells = 0;
  int height_cells = 0;
  double resolution = 0.05;        // meters per cell
  double inflation_radius = 0.3;   // meters
  OccupancyGrid static_occupancy;  // nonzero = blocked

  Cell pose_to_cell(const Pose2D& p) const {
    return {static_cast<int>(std::floor(p.x / resolution)),
            static_cast<int>(std::floor(p.y / resolution))};
  }
  Pose2D cell_center(Cell c) const {
    return {(c.x + 0.5) * resolution, (c.y + 0.5) * resolution};
  }
};

struct ObjectState {
  int id = 0;
  Pose2D position;
  bool collected = false;
};

// Rectangular footprint, rotated by `orientation` about its center.
struct ChairObstacle {
  Pose2D position;
  double orientation = 0.0;  // radians
  double width = 0.45;       // local x extent, meters
  double depth = 0.45;       // local y extent, meters
};

struct Scenario {
  GridMap map;
  std::vector<ObjectState> objects;
  Pose2D robot_start;
  std::vector<ChairObstacle> chairs;
  std::uint64_t seed = 0;
};

struct TableRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct GeneratorConfig {
  double map_width_m = 12.0;
  double map_height_m = 9.0;
  double resolution = 0.05;
  double inflation_radius = 0.3;
  double wall_thickness = 0.1;
  std::vector<TableRect> tables;  // empty = default restaurant layout
  int object_count_min = 5;
  int object_count_max = 7;
  double min_object_spacing = 0.30;
  double edge_depth_min = 0.10;   // object inset from the table edge
  double edge_depth_max = 0.30;
  int chairs_per_object = 1;
  double chair_distance_min = 0.45;
  double chair_distance_max = 0.75;
  double chair_width = 0.45;
  double chair_depth = 0.45;
  Pose2D robot_start{6.0, 3.2};
  int max_retries = 25;
};

// The seven-table layout: one long bar table, two mid-sized, four small.
std::vector<TableRect> default_tables();

// Deterministic for a fixed seed. Retries degenerate layouts (an object
// left without any feasible standing cell) up to config.max_retries and
// throws GenerationError after that.
Scenario generate_scenario(std::uint64_t seed, const GeneratorConfig& config = {});

// Static occupancy plus rasterized chairs, dilated by the inflation radius.
OccupancyGrid effective_occupancy(const GridMap& map, const std::vector<ChairObstacle>& chairs);

bool point_in_chair(const ChairObstacle& chair, const Pose2D& p);

std::string serialize_scenario(const Scenario& s);
Scenario parse_scenario(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace s3o
