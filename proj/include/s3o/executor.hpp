#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3o/planner.hpp"

namespace s3o {

struct NoiseModel {
  double nav_sigma = 0.05;    // std of the isotropic Gaussian landing error, m
  double reach_sigma = 0.02;  // std of the end-effector placement error, m
};

struct ExecutionResult {
  std::vector<bool> per_object_success;  // aligned to scenario.objects
  double completion_rate = 0.0;
  double execution_time = 0.0;         // seconds, from realized trajectories
  std::vector<Pose2D> realized_poses;  // one pose per plan step
};

// One stochastic rollout of a plan. Navigation lands at the goal plus
// Gaussian noise (blocked landings are resampled up to 10 times, then the
// exact goal is used); each pick is a Bernoulli trial at the realized
// pose's motion feasibility, degraded by the end-effector placement error.
// Execution never fails as a whole: unsuccessful picks are recorded and the
// rollout continues.
ExecutionResult execute(const GroundedPlan& plan, const Scenario& scenario,
                        const OccupancyGrid& occ, const FeasibilityParams& fea_params,
                        const NoiseModel& noise, const CostParams& params, PathCache& paths,
                        Rng& rng);

// Difficulty proxy: total area (m^2) of free cells, reachable from the
// robot start, from which at least one object can be feasibly picked.
double feasible_standing_area(const Scenario& scenario);

struct ScenarioOutcome {
  std::uint64_t scenario_seed = 0;
  int group = 0;  // 0 easy, 1 moderate, 2 difficult
  double difficulty_area = 0.0;
  bool plan_found = false;
  double plan_objective = 0.0;
  int nav_steps = 0;
  double mean_completion = 0.0;
  double mean_time = 0.0;
  std::vector<double> trial_completion;
  std::vector<double> trial_time;
};

struct GroupSummary {
  int group = 0;
  double mean_completion = 0.0;
  double std_completion = 0.0;
  double mean_time = 0.0;
  double std_time = 0.0;
  int scenarios = 0;
  int trials = 0;
};

struct EvaluationTable {
  std::vector<ScenarioOutcome> per_scenario;  // batch order
  std::vector<GroupSummary> groups;           // easy, moderate, difficult
};

// Plans each scenario once, rolls the plan out `trials` times, and groups
// scenarios into difficulty terciles (larger feasible area = easier; split
// remainders go to the easier groups). Group statistics treat per-scenario
// trial means as the unit of analysis (sample std, n-1).
EvaluationTable evaluate(PlannerMode mode, const std::vector<Scenario>& batch, int trials,
                         const PlannerOptions& options, const NoiseModel& noise,
                         std::uint64_t seed, int workers = 1);

const char* group_name(int group);

// Self-describing CSV block, header line first:
// mode,group,mean_completion,std_completion,mean_time,std_time,trials
std::string summary_csv(PlannerMode mode, const EvaluationTable& table);

// Header line plus one row per trial:
// mode,scenario_seed,group,trial,completion,time
std::string detail_csv(PlannerMode mode, const EvaluationTable& table);

}  // namespace s3o
