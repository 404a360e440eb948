#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3o/cmaes.hpp"
#include "s3o/feasibility.hpp"
#include "s3o/geometry.hpp"
#include "s3o/partition.hpp"
#include "s3o/pathfinding.hpp"
#include "s3o/taskplan.hpp"
#include "s3o/world.hpp"

namespace s3o {

struct CostParams {
  double v = 0.4;              // robot speed, m/s
  double gamma = 20.0;         // fixed navigation start cost, seconds
  double delta = 5.0;          // manipulation cost, seconds
  double lambda = 150.0;       // pickup reward bonus
  double time_budget = 300.0;  // wall-clock planning budget, seconds
  int sample_budget = 200;     // motion-level samples per sequence
};

enum class PlannerMode {
  S3O_GROP_STAR,  // merged candidates, score-ranked, CMA-ES poses
  S3O_GROP,       // merged candidates, score-ranked, feasibility-sampled poses
  V_GROP_STAR,    // base partition only, CMA-ES poses
  V_GROP,         // base partition only, feasibility-sampled poses
  V_PETLON,       // base partition, uniform poses, efficiency-only selection
  S3O_RANDOM,     // merged candidates drawn uniformly, no score ranking
};

const char* mode_name(PlannerMode mode);
PlannerMode mode_from_name(const std::string& name);  // throws on unknown name
std::vector<PlannerMode> all_modes();

struct PlanStep {
  enum class Kind { Nav, Pick };

  Kind kind = Kind::Nav;
  // Nav fields
  Pose2D from;
  Pose2D to;
  double length = 0.0;  // meters, shortest-path
  // Pick fields
  int object = -1;
  Pose2D robot_pose;
  Pose2D object_pose;
  double feasibility = 0.0;

  static PlanStep nav(Pose2D from, Pose2D to, double length) {
    PlanStep s;
    s.kind = Kind::Nav;
    s.from = from;
    s.to = to;
    s.length = length;
    return s;
  }
  static PlanStep pick(int object, Pose2D robot_pose, Pose2D object_pose, double feasibility) {
    PlanStep s;
    s.kind = Kind::Pick;
    s.object = object;
    s.robot_pose = robot_pose;
    s.object_pose = object_pose;
    s.feasibility = feasibility;
    return s;
  }
};

// A fully grounded plan. utility is the plain reward sum over the steps and
// is always recomputable from them; objective additionally carries the
// soft out-of-location penalties and is what optimization and plan
// selection maximize. They coincide for violation-free plans.
struct GroundedPlan {
  std::vector<PlanStep> steps;
  double utility = 0.0;
  double objective = 0.0;
  int location_violations = 0;
  int state_space_id = 0;
  int sequence_id = 0;
};

struct PlannerOptions {
  CostParams cost;
  FeasibilityParams feasibility;
  CandidateLimits limits;
  int top_k = 5;            // candidates kept by rank_and_select
  int candidate_draws = 5;  // task planners sampled per run
  int sequence_limit = 24;  // task-level sequences per candidate
  int cma_population = 10;
  int cma_generations = 20;
  bool pose_per_object = false;  // default: one pose per location visit
  int workers = 1;
};

struct IncumbentRow {
  int state_space_id = 0;
  int sequence_id = 0;
  double objective = 0.0;
  double utility = 0.0;
};

struct PlanDiagnostics {
  int candidates_enumerated = 0;
  int candidates_scored = 0;
  int candidates_drawn = 0;
  int sequences_optimized = 0;
  long samples_spent = 0;
  bool partial = false;           // the time budget cut the sweep short
  double planning_seconds = 0.0;  // wall clock; reporting only
  std::vector<IncumbentRow> incumbents;
};

struct PlanResult {
  bool found = false;  // false = no feasible plan in any evaluated sequence
  GroundedPlan plan;
  PlanDiagnostics diagnostics;
};

double action_cost(const PlanStep& step, const CostParams& params);
double action_reward(const PlanStep& step, const CostParams& params);

// Grounds a task sequence at concrete standing poses. `poses` holds one
// (x, y) pair per goto in pose-per-group mode, one per pickup in
// pose-per-object mode. Pick feasibilities come from the continuous kernel
// at the exact pose. Unreachable segments or blocked standing cells give
// utility/objective of -infinity.
GroundedPlan ground_sequence(const TaskSequence& seq, const std::vector<double>& poses,
                             const Scenario& scenario, const StateSpace& ss,
                             const OccupancyGrid& occ, const FeasibilityParams& fea_params,
                             const CostParams& params, PathCache& paths,
                             bool pose_per_object = false);

// CMA-ES over the pose vector of one sequence, maximizing the grounded
// objective. Start mean is the feasibility-weighted centroid per visit,
// start spread half the location's bounding-box diagonal. Throws
// InfeasibleSequence when no finite grounding is found within budget.
GroundedPlan optimize_sequence(const TaskSequence& seq, const Scenario& scenario,
                               const StateSpace& ss, const OccupancyGrid& occ,
                               const std::vector<FeasibilityField>& fields,
                               const PlannerOptions& options, PathCache& paths,
                               std::uint64_t seed, long* samples_spent = nullptr);

// Full pipeline for one scenario under the given mode.
PlanResult plan(const Scenario& scenario, PlannerMode mode, const PlannerOptions& options,
                std::uint64_t seed);

// Deterministic structured-text rendering of a plan (no timing fields).
std::string render_plan(const GroundedPlan& plan, PlannerMode mode, std::uint64_t seed,
                        bool found);

}  // namespace s3o
