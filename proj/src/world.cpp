#include "s3o/world.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "s3o/errors.hpp"
#include "s3o/feasibility.hpp"
#include "s3o/rng.hpp"

namespace s3o {

namespace {

void fill_rect(OccupancyGrid& occ, double resolution, const TableRect& r) {
  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x) {
      const double cx = (x + 0.5) * resolution;
      const double cy = (y + 0.5) * resolution;
      if (cx >= r.x0 && cx <= r.x1 && cy >= r.y0 && cy <= r.y1) occ.at(x, y) = 1;
    }
}

// Offsets within Euclidean distance `radius_cells` of the origin cell,
// boundary inclusive. The squared threshold carries a small slack so a
// radius that is an exact multiple of the resolution (0.3 m at 0.05 m
// cells, say) keeps its boundary ring even when the division rounds just
// below the integer; achievable squared offsets are integers, so any
// slack below 1 changes nothing else.
std::vector<Cell> disk_offsets(double radius_cells) {
  std::vector<Cell> offsets;
  const int r = static_cast<int>(std::ceil(radius_cells));
  const double r2 = radius_cells * radius_cells + 1e-6;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r2) offsets.push_back({dx, dy});
  return offsets;
}

OccupancyGrid dilate(const OccupancyGrid& occ, double radius_cells) {
  OccupancyGrid out(occ.width(), occ.height(), 0);
  const auto offsets = disk_offsets(radius_cells);
  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x) {
      if (!occ.at(x, y)) continue;
      for (const auto& d : offsets) {
        const int nx = x + d.x, ny = y + d.y;
        if (out.in_bounds(nx, ny)) out.at(nx, ny) = 1;
      }
    }
  return out;
}

}  // namespace

bool point_in_chair(const ChairObstacle& chair, const Pose2D& p) {
  const double c = std::cos(-chair.orientation);
  const double s = std::sin(-chair.orientation);
  const double dx = p.x - chair.position.x;
  const double dy = p.y - chair.position.y;
  const double lx = c * dx - s * dy;
  const double ly = s * dx + c * dy;
  return std::abs(lx) <= chair.width / 2.0 && std::abs(ly) <= chair.depth / 2.0;
}

OccupancyGrid effective_occupancy(const GridMap& map, const std::vector<ChairObstacle>& chairs) {
  OccupancyGrid base = map.static_occupancy;
  for (int y = 0; y < base.height(); ++y)
    for (int x = 0; x < base.width(); ++x) {
      if (base.at(x, y)) continue;
      const Pose2D center = map.cell_center({x, y});
      for (const auto& chair : chairs)
        if (point_in_chair(chair, center)) {
          base.at(x, y) = 1;
          break;
        }
    }
  return dilate(base, map.inflation_radius / map.resolution);
}

std::vector<TableRect> default_tables() {
  return {
      {1.0, 7.6, 7.0, 8.4},    // bar area
      {1.5, 4.2, 3.1, 5.0},    // mid-sized
      {8.5, 4.2, 10.1, 5.0},   // mid-sized
      {1.6, 1.4, 2.4, 2.2},    // small
      {4.4, 1.4, 5.2, 2.2},    // small
      {7.2, 1.4, 8.0, 2.2},    // small
      {10.0, 1.4, 10.8, 2.2},  // small
  };
}

namespace {

GridMap build_map(const GeneratorConfig& cfg, const std::vector<TableRect>& tables) {
  GridMap map;
  map.resolution = cfg.resolution;
  map.inflation_radius = cfg.inflation_radius;
  map.width_cells = static_cast<int>(std::lround(cfg.map_width_m / cfg.resolution));
  map.height_cells = static_cast<int>(std::lround(cfg.map_height_m / cfg.resolution));
  map.static_occupancy = OccupancyGrid(map.width_cells, map.height_cells, 0);

  const double w = cfg.map_width_m, h = cfg.map_height_m, t = cfg.wall_thickness;
  fill_rect(map.static_occupancy, cfg.resolution, {0, 0, w, t});
  fill_rect(map.static_occupancy, cfg.resolution, {0, h - t, w, h});
  fill_rect(map.static_occupancy, cfg.resolution, {0, 0, t, h});
  fill_rect(map.static_occupancy, cfg.resolution, {w - t, 0, w, h});
  for (const auto& table : tables) fill_rect(map.static_occupancy, cfg.resolution, table);
  return map;
}

// Object positions sit just inside a randomly chosen long edge of the
// table, where the robot can reach them from the adjacent free space.
Pose2D place_on_table(const TableRect& table, const GeneratorConfig& cfg, Rng& rng) {
  const double w = table.x1 - table.x0;
  const double h = table.y1 - table.y0;
  const bool horizontal = w >= h;  // long edges are the top/bottom ones
  const double depth = rng.uniform_range(cfg.edge_depth_min, cfg.edge_depth_max);
  const bool first_edge = rng.uniform() < 0.5;
  const double inset = 0.1;
  if (horizontal) {
    const double x = rng.uniform_range(table.x0 + inset, table.x1 - inset);
    return {x, first_edge ? table.y0 + depth : table.y1 - depth};
  }
  const double y = rng.uniform_range(table.y0 + inset, table.y1 - inset);
  return {first_edge ? table.x0 + depth : table.x1 - depth, y};
}

bool scenario_viable(const Scenario& scenario, const GeneratorConfig& cfg) {
  const FeasibilityParams params;  // default reach kernel for the viability check
  const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);

  const Cell start = scenario.map.pose_to_cell(scenario.robot_start);
  if (!occ.in_bounds(start) || occ.at(start)) return false;

  // Flood fill from the robot start; every object needs at least one
  // reachable standing cell of nonzero feasibility inside its own
  // nearest-object region.
  Grid<unsigned char> reachable(occ.width(), occ.height(), 0);
  std::vector<Cell> stack{start};
  reachable.at(start) = 1;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell nb{c.x + dx, c.y + dy};
        if (!occ.in_bounds(nb) || occ.at(nb) || reachable.at(nb)) continue;
        reachable.at(nb) = 1;
        stack.push_back(nb);
      }
  }

  std::vector<bool> ok(scenario.objects.size(), false);
  const double radius = params.reach_max + scenario.map.resolution;
  for (size_t i = 0; i < scenario.objects.size(); ++i) {
    const Pose2D& yo = scenario.objects[i].position;
    const Cell lo = scenario.map.pose_to_cell({yo.x - radius, yo.y - radius});
    const Cell hi = scenario.map.pose_to_cell({yo.x + radius, yo.y + radius});
    for (int y = std::max(0, lo.y); y <= std::min(occ.height() - 1, hi.y) && !ok[i]; ++y)
      for (int x = std::max(0, lo.x); x <= std::min(occ.width() - 1, hi.x); ++x) {
        if (!reachable.at(x, y)) continue;
        const Pose2D center = scenario.map.cell_center({x, y});
        if (motion_feasibility(center, yo, occ, scenario.map.resolution, params) <= 0.0) continue;
        // Nearest-object tie break matches the partition: lowest index wins.
        size_t nearest = 0;
        double best = distance(center, scenario.objects[0].position);
        for (size_t j = 1; j < scenario.objects.size(); ++j) {
          const double d = distance(center, scenario.objects[j].position);
          if (d < best) {
            best = d;
            nearest = j;
          }
        }
        if (nearest == i) {
          ok[i] = true;
          break;
        }
      }
    if (!ok[i]) return false;
  }
  (void)cfg;
  return true;
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, const GeneratorConfig& config) {
  const std::vector<TableRect> tables = config.tables.empty() ? default_tables() : config.tables;
  Rng rng(derive_seed(seed, 0x5ce0));

  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    Scenario scenario;
    scenario.seed = seed;
    scenario.map = build_map(config, tables);
    scenario.robot_start = config.robot_start;

    const int span = config.object_count_max - config.object_count_min + 1;
    const int count = config.object_count_min + static_cast<int>(rng.uniform_int(span));

    // Tables weighted by area so the long bar table collects clusters.
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& t : tables) {
      total += (t.x1 - t.x0) * (t.y1 - t.y0);
      cumulative.push_back(total);
    }

    bool placed_all = true;
    for (int i = 0; i < count && placed_all; ++i) {
      bool placed = false;
      for (int tries = 0; tries < 40 && !placed; ++tries) {
        const double pick = rng.uniform() * total;
        size_t ti = 0;
        while (ti + 1 < cumulative.size() && cumulative[ti] < pick) ++ti;
        const Pose2D pos = place_on_table(tables[ti], config, rng);
        bool clear = true;
        for (const auto& other : scenario.objects)
          if (distance(pos, other.position) < config.min_object_spacing) clear = false;
        if (!clear) continue;
        scenario.objects.push_back({i, pos, false});
        placed = true;
      }
      placed_all = placed;
    }
    if (!placed_all) continue;

    for (const auto& object : scenario.objects) {
      for (int c = 0; c < config.chairs_per_object; ++c) {
        const double dist = rng.uniform_range(config.chair_distance_min, config.chair_distance_max);
        const double angle = rng.uniform_range(0.0, 2.0 * M_PI);
        ChairObstacle chair;
        chair.position = {object.position.x + dist * std::cos(angle),
                          object.position.y + dist * std::sin(angle)};
        chair.orientation = rng.uniform_range(0.0, 2.0 * M_PI);
        chair.width = config.chair_width;
        chair.depth = config.chair_depth;
        scenario.chairs.push_back(chair);
      }
    }

    // Objects must land on table cells.
    bool on_table = true;
    for (const auto& object : scenario.objects) {
      const Cell c = scenario.map.pose_to_cell(object.position);
      if (!scenario.map.static_occupancy.in_bounds(c) || !scenario.map.static_occupancy.at(c))
        on_table = false;
    }
    if (!on_table) continue;

    if (scenario_viable(scenario, config)) return scenario;
  }
  throw GenerationError("scenario generation exceeded retry cap for seed " + std::to_string(seed));
}

namespace {

nlohmann::json pose_json(const Pose2D& p) { return {{"x", p.x}, {"y", p.y}}; }

Pose2D pose_from(const nlohmann::json& j) { return {j.at("x").get<double>(), j.at("y").get<double>()}; }

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  nlohmann::json j;
  j["map"]["width"] = s.map.width_cells;
  j["map"]["height"] = s.map.height_cells;
  j["map"]["resolution"] = s.map.resolution;
  j["map"]["inflation_radius"] = s.map.inflation_radius;
  std::vector<std::string> rows;
  for (int y = 0; y < s.map.height_cells; ++y) {
    std::string row(s.map.width_cells, '0');
    for (int x = 0; x < s.map.width_cells; ++x)
      if (s.map.static_occupancy.at(x, y)) row[x] = '1';
    rows.push_back(std::move(row));
  }
  j["map"]["rows"] = rows;
  j["objects"] = nlohmann::json::array();
  for (const auto& o : s.objects)
    j["objects"].push_back(
        {{"id", o.id}, {"x", o.position.x}, {"y", o.position.y}, {"collected", o.collected}});
  j["chairs"] = nlohmann::json::array();
  for (const auto& c : s.chairs)
    j["chairs"].push_back({{"x", c.position.x},
                           {"y", c.position.y},
                           {"orientation", c.orientation},
                           {"width", c.width},
                           {"depth", c.depth}});
  j["robot_start"] = pose_json(s.robot_start);
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Scenario s;
  s.map.width_cells = j.at("map").at("width").get<int>();
  s.map.height_cells = j.at("map").at("height").get<int>();
  s.map.resolution = j.at("map").at("resolution").get<double>();
  s.map.inflation_radius = j.at("map").at("inflation_radius").get<double>();
  s.map.static_occupancy = OccupancyGrid(s.map.width_cells, s.map.height_cells, 0);
  const auto& rows = j.at("map").at("rows");
  if (static_cast<int>(rows.size()) != s.map.height_cells)
    throw std::runtime_error("scenario: row count does not match map height");
  for (int y = 0; y < s.map.height_cells; ++y) {
    const std::string row = rows[y].get<std::string>();
    if (static_cast<int>(row.size()) != s.map.width_cells)
      throw std::runtime_error("scenario: row width mismatch at row " + std::to_string(y));
    for (int x = 0; x < s.map.width_cells; ++x) s.map.static_occupancy.at(x, y) = row[x] == '1';
  }
  for (const auto& o : j.at("objects")) {
    ObjectState obj;
    obj.id = o.at("id").get<int>();
    obj.position = {o.at("x").get<double>(), o.at("y").get<double>()};
    obj.collected = o.at("collected").get<bool>();
    s.objects.push_back(obj);
  }
  for (const auto& c : j.at("chairs")) {
    ChairObstacle chair;
    chair.position = {c.at("x").get<double>(), c.at("y").get<double>()};
    chair.orientation = c.at("orientation").get<double>();
    chair.width = c.at("width").get<double>();
    chair.depth = c.at("depth").get<double>();
    s.chairs.push_back(chair);
  }
  s.robot_start = pose_from(j.at("robot_start"));
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << serialize_scenario(s);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace s3o
