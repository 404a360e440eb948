#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "s3o/errors.hpp"
#include "s3o/feasibility.hpp"
#include "s3o/partition.hpp"

using namespace s3o;
using s3o::testing::add_object;
using s3o::testing::open_scenario;

namespace {

// Closed form for the sampling distribution's expectation: cells are drawn
// proportionally to their field value f, and the estimator averages f at the
// drawn cell, so E = sum(f^2) / sum(f) over the location's cells.
double oracle_expected_feasibility(const FeasibilityField& field, const StateSpace& ss,
                                   int location) {
  double num = 0, den = 0;
  for (const Cell& c : ss.locations[location].cells) {
    const double f = field.values.at(c);
    num += f * f;
    den += f;
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace

TEST_CASE("reach kernel has the documented trapezoid shape") {
  const auto s = open_scenario(60, 60, 0.05);
  const FeasibilityParams params;
  const Pose2D object{1.5, 1.5};
  const auto at = [&](double d) {
    return motion_feasibility({1.5 + d, 1.5}, object, s.map.static_occupancy, 0.05, params);
  };
  CHECK(at(0.0) == 0.0);
  CHECK(at(0.29) == 0.0);
  // The kernel is continuous at the ramp ends, so representation noise in
  // the probe distance only moves the value by the same epsilon.
  CHECK(std::abs(at(0.30)) < 1e-12);
  CHECK(at(0.325) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(at(0.35) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at(0.50) == 1.0);
  CHECK(at(0.70) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at(0.85) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(at(0.925) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(std::abs(at(1.00)) < 1e-12);
  CHECK(at(1.20) == 0.0);
}

TEST_CASE("blocked or out-of-map standing poses are infeasible") {
  auto s = open_scenario(40, 40, 0.05);
  s.map.static_occupancy.at(20, 10) = 1;
  const FeasibilityParams params;
  const Pose2D object{1.0, 0.5};
  // Cell (20, 10) has center (1.025, 0.525); distance to object ~0.034... use
  // a pose inside the blocked cell but at a feasible range from the object.
  const Pose2D blocked_pose{1.024, 0.525};
  const Pose2D object2{1.5, 0.525};
  CHECK(motion_feasibility(blocked_pose, object2, s.map.static_occupancy, 0.05, params) == 0.0);
  CHECK(motion_feasibility({-0.1, 0.5}, object, s.map.static_occupancy, 0.05, params) == 0.0);
  CHECK(motion_feasibility({0.5, 99.0}, object, s.map.static_occupancy, 0.05, params) == 0.0);
}

TEST_CASE("field values equal the kernel evaluated at cell centers") {
  auto s = open_scenario(50, 40, 0.05);
  s.map.static_occupancy.at(25, 20) = 1;
  s.map.static_occupancy.at(26, 20) = 1;
  add_object(s, 1.3, 1.0);
  const FeasibilityParams params;
  const auto field = build_field(s.objects[0], s.map.static_occupancy, 0.05, params);
  REQUIRE(field.values.width() == 50);
  REQUIRE(field.values.height() == 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 50; ++x) {
      const double want = motion_feasibility(s.map.cell_center({x, y}), s.objects[0].position,
                                             s.map.static_occupancy, 0.05, params);
      CHECK(field.values.at(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("sampler draws cells proportionally to field mass") {
  // Synthetic two-cell location with weights 1/4 and 3/4.
  auto s = open_scenario(10, 10, 0.1);
  StateSpace ss;
  ss.resolution = 0.1;
  ss.labels = LabelGrid(10, 10, -1);
  ss.labels.at(2, 2) = 0;
  ss.labels.at(7, 7) = 0;
  ss.locations.push_back({{0}, {{2, 2}, {7, 7}}, {0}});
  ss.object_location = {0};

  FeasibilityField field;
  field.values = Grid<double>(10, 10, 0.0);
  field.values.at(2, 2) = 0.2;
  field.values.at(7, 7) = 0.6;

  Rng rng(555);
  const int n = 40000;
  const auto draws = sample_positions_smp(field, ss, 0, n, rng);
  REQUIRE(draws.size() == static_cast<size_t>(n));
  int heavy = 0;
  for (const auto& p : draws) {
    const bool at_heavy = std::abs(p.x - 0.75) < 1e-9 && std::abs(p.y - 0.75) < 1e-9;
    const bool at_light = std::abs(p.x - 0.25) < 1e-9 && std::abs(p.y - 0.25) < 1e-9;
    CHECK((at_heavy || at_light));  // draws land exactly on cell centers
    if (at_heavy) ++heavy;
  }
  // Binomial(n, 0.75): five sigmas is ~0.011.
  CHECK(static_cast<double>(heavy) / n == doctest::Approx(0.75).epsilon(0.015));
}

TEST_CASE("sampling an empty-support location throws") {
  StateSpace ss;
  ss.resolution = 0.1;
  ss.labels = LabelGrid(4, 4, -1);
  ss.labels.at(1, 1) = 0;
  ss.locations.push_back({{0}, {{1, 1}}, {0}});
  ss.object_location = {0};
  FeasibilityField field;
  field.values = Grid<double>(4, 4, 0.0);
  Rng rng(1);
  CHECK_THROWS_AS(sample_positions_smp(field, ss, 0, 5, rng), EmptySupport);
  // ...but the task-level score degrades to zero instead of erroring.
  FeasibilityParams params;
  CHECK(task_feasibility(field, ss, 0, params, rng) == 0.0);
}

TEST_CASE("task feasibility converges to the closed-form expectation") {
  auto s = open_scenario(80, 60, 0.05, true);
  add_object(s, 1.6, 1.4);
  add_object(s, 2.6, 1.6);
  s.map.static_occupancy.at(30, 30) = 1;
  s.map.static_occupancy.at(31, 30) = 1;
  FeasibilityParams params;
  const auto base = base_voronoi(s, s.map.static_occupancy, params);

  params.sample_count = 100000;
  for (size_t obj = 0; obj < s.objects.size(); ++obj) {
    const auto field = build_field(s.objects[obj], s.map.static_occupancy, 0.05, params);
    const int loc = base.object_location[obj];
    const double want = oracle_expected_feasibility(field, base, loc);
    Rng rng(900 + obj);
    const double got = task_feasibility(field, base, loc, params, rng);
    CHECK(got == doctest::Approx(want).epsilon(0.0).scale(1.0).epsilon(0.02));
    CHECK(want > 0.3);  // the scene actually has meaningful support
  }
}

TEST_CASE("constant fields estimate exactly") {
  // Every cell carries the same value, so any draw pattern averages to it.
  StateSpace ss;
  ss.resolution = 0.1;
  ss.labels = LabelGrid(6, 6, -1);
  Location loc;
  loc.objects = {0};
  for (int x = 0; x < 3; ++x) {
    ss.labels.at(x, 0) = 0;
    loc.cells.push_back({x, 0});
  }
  ss.locations.push_back(loc);
  ss.object_location = {0};
  FeasibilityField field;
  field.values = Grid<double>(6, 6, 0.0);
  for (int x = 0; x < 3; ++x) field.values.at(x, 0) = 0.8;
  FeasibilityParams params;
  params.sample_count = 50;
  Rng rng(4);
  CHECK(task_feasibility(field, ss, 0, params, rng) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("pgm export writes the exact header and payload") {
  Grid<double> values(3, 2, 0.0);
  values.at(0, 0) = 1.0;
  values.at(2, 1) = 0.5;
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "s3o_test_field.pgm";
  write_pgm(values, path.string());
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(content.size() == header.size() + 6);
  CHECK(content.substr(0, header.size()) == header);
  const auto* pixels = reinterpret_cast<const unsigned char*>(content.data() + header.size());
  CHECK(pixels[0] == 255);
  CHECK(pixels[1] == 0);
  CHECK(pixels[5] == 128);  // round(0.5 * 255)
  fs::remove(path);
}
