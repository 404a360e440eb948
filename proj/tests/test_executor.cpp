#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "s3o/executor.hpp"

using namespace s3o;
using s3o::testing::add_object;
using s3o::testing::open_scenario;

namespace {

// Hand-built plan: one nav of `length` meters to `pose`, then one pick of
// object 0 standing at `pose`.
GroundedPlan nav_pick_plan(const Scenario& s, Pose2D pose, double length) {
  GroundedPlan plan;
  plan.steps.push_back(PlanStep::nav(s.robot_start, pose, length));
  plan.steps.push_back(PlanStep::pick(0, pose, s.objects[0].position, 0.0));
  return plan;
}

}  // namespace

TEST_CASE("noise-free rollouts realize the plan exactly") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.55);
  const FeasibilityParams fea;
  const CostParams cost;
  const NoiseModel quiet{0.0, 0.0};
  PathCache paths(s.map.static_occupancy, 0.1);

  // Stand 0.5 m below the object: full feasibility, 4 m straight path.
  const auto plan = nav_pick_plan(s, {5.05, 1.05}, 4.0);
  Rng rng(1);
  const auto result =
      execute(plan, s, s.map.static_occupancy, fea, quiet, cost, paths, rng);
  CHECK(result.completion_rate == 1.0);
  REQUIRE(result.per_object_success.size() == 1);
  CHECK(result.per_object_success[0]);
  // time = 4/0.4 + 20 + 5 = 35, from the realized (noise-free) trajectory.
  CHECK(result.execution_time == doctest::Approx(35.0).epsilon(1e-9));
  REQUIRE(result.realized_poses.size() == 2);
  CHECK(result.realized_poses[0].x == doctest::Approx(5.05).epsilon(1e-12));
  CHECK(result.realized_poses[1].x == doctest::Approx(5.05).epsilon(1e-12));
}

TEST_CASE("zero-feasibility picks always fail") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.55);
  const FeasibilityParams fea;
  const CostParams cost;
  const NoiseModel quiet{0.0, 0.0};
  PathCache paths(s.map.static_occupancy, 0.1);
  // Standing 3 m away (straight-line 1 m hop from the start) is hopeless,
  // but the rollout still charges the manipulation cost.
  const auto plan = nav_pick_plan(s, {2.05, 1.05}, 1.0);
  Rng rng(2);
  const auto result =
      execute(plan, s, s.map.static_occupancy, fea, quiet, cost, paths, rng);
  CHECK(result.completion_rate == 0.0);
  CHECK_FALSE(result.per_object_success[0]);
  CHECK(result.execution_time == doctest::Approx(1.0 / 0.4 + 20.0 + 5.0).epsilon(1e-9));
}

TEST_CASE("pick success follows the feasibility as a Bernoulli rate") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.375);  // 0.325 above the stand pose: kernel 0.5
  const FeasibilityParams fea;
  const CostParams cost;
  const NoiseModel quiet{0.0, 0.0};
  PathCache paths(s.map.static_occupancy, 0.1);

  // Straight-line 4 m hop keeps the realized time at exactly 35 s.
  const auto plan = nav_pick_plan(s, {5.05, 1.05}, 4.0);
  Rng rng(3);
  int hits = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto result =
        execute(plan, s, s.map.static_occupancy, fea, quiet, cost, paths, rng);
    if (result.completion_rate == 1.0) ++hits;
    // Pick outcomes never change the clock.
    CHECK(result.execution_time == doctest::Approx(35.0).epsilon(1e-9));
  }
  // Binomial(10^4, 0.5): 0.015 is three sigmas.
  CHECK(static_cast<double>(hits) / trials == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("reach noise degrades success below the noise-free rate") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.55);
  const FeasibilityParams fea;
  const CostParams cost;
  PathCache paths(s.map.static_occupancy, 0.1);
  const auto plan = nav_pick_plan(s, {5.05, 1.05}, 4.0);  // feasibility 1.0

  const NoiseModel noisy{0.0, 0.10};
  Rng rng(4);
  int hits = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto result = execute(plan, s, s.map.static_occupancy, fea, noisy, cost, paths, rng);
    hits += result.completion_rate == 1.0;
  }
  // The multiplicative degradation exp(-e^2 / (2 sigma^2 * 25)) with
  // e ~ |N(0, sigma^2)| averages to (1 + 2/50)^(-1/2) ~ 0.98058 for any
  // sigma > 0; binomial noise at 10^4 trials is ~0.0014 per sigma.
  const double rate = static_cast<double>(hits) / trials;
  CHECK(rate < 0.9950);
  CHECK(rate == doctest::Approx(0.98058).epsilon(0.006));
}

TEST_CASE("nav noise moves the realized pose and the realized time") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.55);
  const FeasibilityParams fea;
  const CostParams cost;
  PathCache paths(s.map.static_occupancy, 0.1);
  const auto plan = nav_pick_plan(s, {5.05, 1.05}, 4.0);

  const NoiseModel drifty{0.15, 0.0};
  Rng rng(5);
  bool moved = false;
  bool time_changed = false;
  for (int t = 0; t < 50; ++t) {
    const auto result = execute(plan, s, s.map.static_occupancy, fea, drifty, cost, paths, rng);
    if (std::abs(result.realized_poses[0].x - 5.05) > 1e-6) moved = true;
    if (std::abs(result.execution_time - 35.0) > 1e-6) time_changed = true;
  }
  CHECK(moved);
  CHECK(time_changed);
}

TEST_CASE("blocked landings fall back to the planned goal") {
  auto s = open_scenario(80, 40, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 1.55);
  // Ring of walls with a single free cell at the stand pose: nearly every
  // noisy landing is blocked, so the fallback keeps rollouts going.
  for (int x = 45; x <= 56; ++x)
    for (int y = 5; y <= 16; ++y)
      if (!(x == 50 && y == 10)) s.map.static_occupancy.at(x, y) = 1;
  const FeasibilityParams fea;
  const CostParams cost;
  PathCache paths(s.map.static_occupancy, 0.1);
  GroundedPlan plan;
  plan.steps.push_back(PlanStep::nav(s.robot_start, {5.05, 1.05}, 6.0));
  const NoiseModel drifty{0.5, 0.0};
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto result = execute(plan, s, s.map.static_occupancy, fea, drifty, cost, paths, rng);
    const auto cell = s.map.pose_to_cell(result.realized_poses[0]);
    CHECK(s.map.static_occupancy.at(cell) == 0);
  }
}

TEST_CASE("feasible standing area matches the annulus for one open object") {
  auto s = open_scenario(100, 100, 0.1);
  s.robot_start = {1.05, 1.05};
  add_object(s, 5.05, 5.05);
  // Kernel support is the annulus 0.3 < d < 1.0 around the object; the
  // cell-quantized area should be close to pi * (1 - 0.09).
  const double area = feasible_standing_area(s);
  const double annulus = M_PI * (1.0 - 0.09);
  CHECK(area > 0.85 * annulus);
  CHECK(area < 1.15 * annulus);

  // Walling the robot away drops the reachable area to zero.
  auto walled = s;
  for (int y = 0; y < 100; ++y) walled.map.static_occupancy.at(25, y) = 1;
  CHECK(feasible_standing_area(walled) == 0.0);
}

TEST_CASE("more obstacles never increase the feasible area") {
  GeneratorConfig config;
  config.resolution = 0.1;
  const Scenario s = generate_scenario(81, config);
  const double with_chairs = feasible_standing_area(s);
  Scenario bare = s;
  bare.chairs.clear();
  const double without = feasible_standing_area(bare);
  CHECK(with_chairs <= without + 1e-9);
  CHECK(without > 0.0);
}

TEST_CASE("evaluation groups scenarios into terciles by area") {
  GeneratorConfig config;
  config.resolution = 0.1;
  std::vector<Scenario> batch;
  for (std::uint64_t seed = 101; seed <= 108; ++seed)
    batch.push_back(generate_scenario(seed, config));

  PlannerOptions options;
  options.cma_population = 8;
  options.cma_generations = 4;
  options.cost.sample_budget = 32;
  const NoiseModel noise;
  const auto table = evaluate(PlannerMode::V_GROP, batch, 3, options, noise, 17);

  REQUIRE(table.per_scenario.size() == 8);
  REQUIRE(table.groups.size() == 3);
  // 8 = 3 + 3 + 2: remainders go to the easier (larger-area) groups.
  CHECK(table.groups[0].scenarios == 3);
  CHECK(table.groups[1].scenarios == 3);
  CHECK(table.groups[2].scenarios == 2);
  CHECK(table.groups[0].trials == 9);
  CHECK(table.groups[2].trials == 6);

  // Group 0 holds the largest areas, group 2 the smallest.
  double min_easy = 1e18, max_hard = -1e18;
  for (const auto& row : table.per_scenario) {
    if (row.group == 0) min_easy = std::min(min_easy, row.difficulty_area);
    if (row.group == 2) max_hard = std::max(max_hard, row.difficulty_area);
    CHECK(row.trial_completion.size() == 3);
    CHECK(row.trial_time.size() == 3);
    for (double c : row.trial_completion) {
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
    }
  }
  CHECK(min_easy >= max_hard);

  // Summary means are the means of the per-scenario means.
  for (const auto& g : table.groups) {
    double acc = 0;
    int n = 0;
    for (const auto& row : table.per_scenario)
      if (row.group == g.group) {
        acc += row.mean_completion;
        ++n;
      }
    REQUIRE(n == g.scenarios);
    CHECK(g.mean_completion == doctest::Approx(acc / n).epsilon(1e-9));
    CHECK(g.std_completion >= 0.0);
  }
}

TEST_CASE("evaluation is deterministic and worker-count invariant") {
  GeneratorConfig config;
  config.resolution = 0.1;
  std::vector<Scenario> batch;
  for (std::uint64_t seed = 111; seed <= 114; ++seed)
    batch.push_back(generate_scenario(seed, config));
  PlannerOptions options;
  options.cma_population = 8;
  options.cma_generations = 4;
  options.cost.sample_budget = 32;
  const NoiseModel noise;

  const auto a = evaluate(PlannerMode::S3O_GROP_STAR, batch, 2, options, noise, 23, 1);
  const auto b = evaluate(PlannerMode::S3O_GROP_STAR, batch, 2, options, noise, 23, 4);
  CHECK(summary_csv(PlannerMode::S3O_GROP_STAR, a) == summary_csv(PlannerMode::S3O_GROP_STAR, b));
  CHECK(detail_csv(PlannerMode::S3O_GROP_STAR, a) == detail_csv(PlannerMode::S3O_GROP_STAR, b));

  const auto c = evaluate(PlannerMode::S3O_GROP_STAR, batch, 2, options, noise, 24, 1);
  CHECK(detail_csv(PlannerMode::S3O_GROP_STAR, a) != detail_csv(PlannerMode::S3O_GROP_STAR, c));
}

TEST_CASE("csv blocks carry the documented headers and row counts") {
  GeneratorConfig config;
  config.resolution = 0.1;
  std::vector<Scenario> batch;
  for (std::uint64_t seed = 121; seed <= 123; ++seed)
    batch.push_back(generate_scenario(seed, config));
  PlannerOptions options;
  options.cma_population = 8;
  options.cma_generations = 4;
  options.cost.sample_budget = 32;
  const auto table = evaluate(PlannerMode::V_PETLON, batch, 2, options, {}, 31);

  const std::string summary = summary_csv(PlannerMode::V_PETLON, table);
  std::istringstream sin(summary);
  std::string line;
  std::getline(sin, line);
  CHECK(line == "mode,group,mean_completion,std_completion,mean_time,std_time,trials");
  int rows = 0;
  while (std::getline(sin, line))
    if (!line.empty()) {
      CHECK(line.find("v-petlon,") == 0);
      ++rows;
    }
  CHECK(rows == 3);  // one per difficulty tercile

  const std::string detail = detail_csv(PlannerMode::V_PETLON, table);
  std::istringstream din(detail);
  std::getline(din, line);
  CHECK(line == "mode,scenario_seed,group,trial,completion,time");
  rows = 0;
  while (std::getline(din, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);  // 3 scenarios x 2 trials
}
