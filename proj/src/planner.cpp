#include "s3o/planner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "s3o/errors.hpp"
#include "s3o/rng.hpp"

namespace s3o {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Seed salts for the independent random streams of one planning run.
constexpr std::uint64_t kScoreSalt = 0x5c07e;
constexpr std::uint64_t kDrawSalt = 0xd7a3;
constexpr std::uint64_t kItemSalt = 0x17e5;

}  // namespace

const char* mode_name(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::S3O_GROP_STAR: return "s3o-grop-star";
    case PlannerMode::S3O_GROP: return "s3o-grop";
    case PlannerMode::V_GROP_STAR: return "v-grop-star";
    case PlannerMode::V_GROP: return "v-grop";
    case PlannerMode::V_PETLON: return "v-petlon";
    case PlannerMode::S3O_RANDOM: return "s3o-random";
  }
  return "unknown";
}

PlannerMode mode_from_name(const std::string& name) {
  for (PlannerMode mode : all_modes())
    if (name == mode_name(mode)) return mode;
  throw std::invalid_argument("unknown planner mode: " + name);
}

std::vector<PlannerMode> all_modes() {
  return {PlannerMode::S3O_GROP_STAR, PlannerMode::S3O_GROP, PlannerMode::V_GROP_STAR,
          PlannerMode::V_GROP,        PlannerMode::V_PETLON, PlannerMode::S3O_RANDOM};
}

double action_cost(const PlanStep& step, const CostParams& params) {
  if (step.kind == PlanStep::Kind::Nav) return step.length / params.v + params.gamma;
  return params.delta;
}

double action_reward(const PlanStep& step, const CostParams& params) {
  if (step.kind == PlanStep::Kind::Nav) return -action_cost(step, params);
  return -params.delta + step.feasibility * params.lambda;
}

namespace {

// Pose variable slots of a sequence: the location each sampled (x, y) pair
// must fall into, in pose-vector order.
std::vector<int> slot_locations(const TaskSequence& seq, bool pose_per_object) {
  std::vector<int> slots;
  for (const TaskAction& a : seq.actions) {
    if (pose_per_object) {
      if (a.kind == TaskAction::Kind::Pickup) slots.push_back(a.location);
    } else {
      if (a.kind == TaskAction::Kind::Goto) slots.push_back(a.to);
    }
  }
  return slots;
}

GroundedPlan infeasible_plan(const TaskSequence& seq) {
  GroundedPlan plan;
  plan.state_space_id = seq.state_space_id;
  plan.utility = kNegInf;
  plan.objective = kNegInf;
  return plan;
}

}  // namespace

GroundedPlan ground_sequence(const TaskSequence& seq, const std::vector<double>& poses,
                             const Scenario& scenario, const StateSpace& ss,
                             const OccupancyGrid& occ, const FeasibilityParams& fea_params,
                             const CostParams& params, PathCache& paths, bool pose_per_object) {
  const std::vector<int> slots = slot_locations(seq, pose_per_object);
  if (poses.size() != 2 * slots.size())
    throw std::invalid_argument("ground_sequence: pose vector length mismatch");

  GroundedPlan plan;
  plan.state_space_id = seq.state_space_id;

  Pose2D current = scenario.robot_start;
  size_t slot = 0;
  double utility = 0.0;

  const auto move_to = [&](const Pose2D& target) -> bool {
    const Cell from = scenario.map.pose_to_cell(current);
    const Cell to = scenario.map.pose_to_cell(target);
    if (!occ.in_bounds(to) || occ.at(to)) return false;
    const auto length = paths.length(from, to);
    if (!length) return false;
    plan.steps.push_back(PlanStep::nav(current, target, *length));
    utility += action_reward(plan.steps.back(), params);
    current = target;
    return true;
  };
  const auto check_slot_location = [&](const Pose2D& pose, int location) {
    const Cell c = scenario.map.pose_to_cell(pose);
    if (!ss.labels.in_bounds(c) || ss.labels.at(c) != location) ++plan.location_violations;
  };
  const auto next_slot_pose = [&]() {
    const Pose2D pose{poses[2 * slot], poses[2 * slot + 1]};
    ++slot;
    return pose;
  };

  for (const TaskAction& a : seq.actions) {
    if (a.kind == TaskAction::Kind::Goto) {
      if (pose_per_object) continue;  // navigation happens per pickup below
      const Pose2D target = next_slot_pose();
      check_slot_location(target, a.to);
      if (!move_to(target)) return infeasible_plan(seq);
    } else {
      if (pose_per_object) {
        const Pose2D target = next_slot_pose();
        check_slot_location(target, a.location);
        if (!move_to(target)) return infeasible_plan(seq);
      }
      const Pose2D& object_pose = scenario.objects[a.object].position;
      const double fea =
          motion_feasibility(current, object_pose, occ, scenario.map.resolution, fea_params);
      plan.steps.push_back(PlanStep::pick(a.object, current, object_pose, fea));
      utility += action_reward(plan.steps.back(), params);
    }
  }

  plan.utility = utility;
  plan.objective = utility - params.lambda * plan.location_violations;
  return plan;
}

namespace {

struct SlotGeometry {
  Pose2D mean;
  double spread = 0.0;  // half the bounding-box diagonal
  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
};

// Weighted centroid and bounding box of one location's cells, weights from
// the feasibility fields of the location's objects.
SlotGeometry slot_geometry(const StateSpace& ss, int location,
                           const std::vector<FeasibilityField>& fields) {
  const Location& loc = ss.locations[location];
  if (loc.cells.empty()) throw InfeasibleSequence("location l" + std::to_string(location + 1) +
                                                  " has no standing cells");
  SlotGeometry g;
  double wx = 0.0, wy = 0.0, total = 0.0;
  double sx = 0.0, sy = 0.0;
  int min_x = loc.cells[0].x, max_x = loc.cells[0].x;
  int min_y = loc.cells[0].y, max_y = loc.cells[0].y;
  for (const Cell& c : loc.cells) {
    const double cx = (c.x + 0.5) * ss.resolution;
    const double cy = (c.y + 0.5) * ss.resolution;
    double w = 0.0;
    for (int obj : loc.objects) w += fields[obj].values.at(c);
    wx += w * cx;
    wy += w * cy;
    total += w;
    sx += cx;
    sy += cy;
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  if (total > 0.0)
    g.mean = {wx / total, wy / total};
  else
    g.mean = {sx / loc.cells.size(), sy / loc.cells.size()};
  g.lo_x = min_x * ss.resolution;
  g.hi_x = (max_x + 1) * ss.resolution;
  g.lo_y = min_y * ss.resolution;
  g.hi_y = (max_y + 1) * ss.resolution;
  const double w = g.hi_x - g.lo_x, h = g.hi_y - g.lo_y;
  g.spread = 0.5 * std::sqrt(w * w + h * h);
  return g;
}

// Per-slot standing-cell sampler (the Smp scheme): each visit's cell is
// drawn independently, weighted by the summed feasibility fields of the
// location's objects (uniform over the location's cells for the
// efficiency-only baseline, or when the fields carry no mass there). Poses
// land on cell centers.
class SlotSampler {
 public:
  SlotSampler(const std::vector<int>& slots, const StateSpace& ss,
              const std::vector<FeasibilityField>& fields, bool weighted)
      : resolution_(ss.resolution) {
    for (int location : slots) {
      const Location& loc = ss.locations[location];
      if (loc.cells.empty())
        throw InfeasibleSequence("location l" + std::to_string(location + 1) +
                                 " has no standing cells");
      Support support;
      support.cells = &loc.cells;
      if (weighted) {
        support.cumulative.reserve(loc.cells.size());
        for (const Cell& c : loc.cells) {
          double w = 0.0;
          for (int obj : loc.objects) w += fields[obj].values.at(c);
          support.total += w;
          support.cumulative.push_back(support.total);
        }
        if (support.total <= 0.0) support.cumulative.clear();  // fall back to uniform
      }
      supports_.push_back(std::move(support));
    }
  }

  std::vector<double> draw(Rng& rng) const {
    std::vector<double> poses;
    poses.reserve(2 * supports_.size());
    for (const Support& support : supports_) {
      const Cell c = draw_cell(support, rng);
      poses.push_back((c.x + 0.5) * resolution_);
      poses.push_back((c.y + 0.5) * resolution_);
    }
    return poses;
  }

 private:
  struct Support {
    const std::vector<Cell>* cells = nullptr;
    std::vector<double> cumulative;  // empty = uniform over cells
    double total = 0.0;
  };

  Cell draw_cell(const Support& support, Rng& rng) const {
    if (!support.cumulative.empty()) {
      const double pick = rng.uniform() * support.total;
      const auto it =
          std::upper_bound(support.cumulative.begin(), support.cumulative.end(), pick);
      const size_t idx =
          std::min<size_t>(it - support.cumulative.begin(), support.cells->size() - 1);
      return (*support.cells)[idx];
    }
    return (*support.cells)[rng.uniform_int(support.cells->size())];
  }

  double resolution_;
  std::vector<Support> supports_;
};

}  // namespace

GroundedPlan optimize_sequence(const TaskSequence& seq, const Scenario& scenario,
                               const StateSpace& ss, const OccupancyGrid& occ,
                               const std::vector<FeasibilityField>& fields,
                               const PlannerOptions& options, PathCache& paths,
                               std::uint64_t seed, long* samples_spent) {
  const std::vector<int> slots = slot_locations(seq, options.pose_per_object);
  if (slots.empty()) {
    GroundedPlan plan = ground_sequence(seq, {}, scenario, ss, occ, options.feasibility, options.cost, paths,
                                        options.pose_per_object);
    plan.state_space_id = seq.state_space_id;
    return plan;
  }

  // Budget split: the adaptive sampler is layered on top of the plain
  // feasibility-weighted one, so roughly half the grounding budget funds
  // warm-up draws from the weighted cell distribution and the rest funds
  // CMA-ES refinement over continuous poses. The best-ever grounding across
  // both phases wins, so refinement can only improve on the warm-up. When
  // the budget cannot afford a full CMA generation, it all goes to draws.
  const int budget = std::max(1, options.cost.sample_budget);
  const int lambda = std::max(2, options.cma_population);
  const int cma_generations =
      std::min(options.cma_generations, (budget / 2) / lambda);
  const int warmup = budget - cma_generations * lambda;

  Rng rng(seed);
  GroundedPlan best = infeasible_plan(seq);
  const auto consider = [&](const std::vector<double>& pose_vector) {
    GroundedPlan plan = ground_sequence(seq, pose_vector, scenario, ss, occ,
                                        options.feasibility, options.cost, paths,
                                        options.pose_per_object);
    if (samples_spent) ++*samples_spent;
    const double objective = plan.objective;
    if (objective > best.objective) best = std::move(plan);
    return objective;
  };

  const SlotSampler sampler(slots, ss, fields, /*weighted=*/true);
  for (int draw = 0; draw < warmup; ++draw) consider(sampler.draw(rng));

  if (cma_generations > 0) {
    CmaConfig config;
    config.lambda_pop = lambda;
    config.max_generations = cma_generations;

    std::vector<double> mean;
    for (int location : slots) {
      const SlotGeometry g = slot_geometry(ss, location, fields);
      mean.push_back(g.mean.x);
      mean.push_back(g.mean.y);
      config.initial_std.push_back(std::max(g.spread, ss.resolution));
      config.initial_std.push_back(std::max(g.spread, ss.resolution));
      config.lower.push_back(g.lo_x);
      config.upper.push_back(g.hi_x);
      config.lower.push_back(g.lo_y);
      config.upper.push_back(g.hi_y);
    }

    // Fitness shaping for unreachable samples: a pose standing on a blocked
    // cell (e.g. the table interior) grounds to -infinity, but ranking such
    // samples by their distance to the slot's nearest standing cell keeps
    // the selection gradient pointing back toward the support instead of
    // leaving a flat plateau. Shaped values stay far below every feasible
    // objective, so feasible samples always win.
    std::vector<std::vector<Pose2D>> slot_centers;
    slot_centers.reserve(slots.size());
    for (int location : slots) {
      std::vector<Pose2D> centers;
      centers.reserve(ss.locations[location].cells.size());
      for (const Cell& c : ss.locations[location].cells)
        centers.push_back({(c.x + 0.5) * ss.resolution, (c.y + 0.5) * ss.resolution});
      slot_centers.push_back(std::move(centers));
    }
    const auto support_distance = [&](const std::vector<double>& pose_vector) {
      double total = 0.0;
      for (size_t s = 0; s < slot_centers.size(); ++s) {
        const double px = pose_vector[2 * s], py = pose_vector[2 * s + 1];
        double nearest = std::numeric_limits<double>::infinity();
        for (const Pose2D& c : slot_centers[s]) {
          const double dx = px - c.x, dy = py - c.y;
          nearest = std::min(nearest, dx * dx + dy * dy);
        }
        total += std::sqrt(nearest);
      }
      return total;
    };

    CmaEs es(mean, config);
    while (!es.exhausted()) {
      const auto samples = es.ask(rng);
      std::vector<double> fitnesses;
      fitnesses.reserve(samples.size());
      for (const auto& pose_vector : samples) {
        const double objective = consider(pose_vector);
        fitnesses.push_back(std::isfinite(objective)
                                ? objective
                                : -1e9 * (1.0 + support_distance(pose_vector)));
      }
      es.tell(samples, fitnesses);
    }
  }

  if (!std::isfinite(best.objective))
    throw InfeasibleSequence("no reachable grounding found for sequence");
  return best;
}

namespace {

// Sampling-only pose optimizers (no covariance adaptation): draw
// `sample_budget` pose vectors, keep the best grounding. Cells are drawn
// feasibility-weighted (the Smp scheme) or uniformly (the PETLON reading),
// and poses land on cell centers either way.
GroundedPlan sample_best_of_budget(const TaskSequence& seq, const Scenario& scenario,
                                   const StateSpace& ss, const OccupancyGrid& occ,
                                   const std::vector<FeasibilityField>& fields,
                                   const PlannerOptions& options, PathCache& paths,
                                   std::uint64_t seed, bool weighted, bool efficiency_only,
                                   long* samples_spent) {
  const std::vector<int> slots = slot_locations(seq, options.pose_per_object);
  if (slots.empty()) {
    GroundedPlan plan = ground_sequence(seq, {}, scenario, ss, occ, options.feasibility, options.cost, paths,
                                        options.pose_per_object);
    plan.state_space_id = seq.state_space_id;
    return plan;
  }

  const SlotSampler sampler(slots, ss, fields, weighted);
  Rng rng(seed);
  const auto selection_value = [&](const GroundedPlan& plan) {
    if (!std::isfinite(plan.objective)) return kNegInf;
    if (!efficiency_only) return plan.objective;
    double value = 0.0;
    for (const PlanStep& step : plan.steps) value -= action_cost(step, options.cost);
    return value - options.cost.lambda * plan.location_violations;
  };

  GroundedPlan best = infeasible_plan(seq);
  double best_value = kNegInf;
  for (int draw = 0; draw < options.cost.sample_budget; ++draw) {
    GroundedPlan plan = ground_sequence(seq, sampler.draw(rng), scenario, ss, occ,
                                        options.feasibility, options.cost, paths,
                                        options.pose_per_object);
    if (samples_spent) ++*samples_spent;
    const double value = selection_value(plan);
    if (value > best_value) {
      best_value = value;
      best = plan;
    }
  }

  if (!std::isfinite(best.objective))
    throw InfeasibleSequence("no reachable grounding found for sequence");
  return best;
}

struct WorkItem {
  const StateSpace* candidate = nullptr;
  TaskSequence sequence;
  int sequence_index = 0;
  std::uint64_t seed = 0;
};

struct ItemResult {
  bool feasible = false;
  bool evaluated = false;
  GroundedPlan plan;
  long samples = 0;
  double selection = kNegInf;
};

}  // namespace

PlanResult plan(const Scenario& scenario, PlannerMode mode, const PlannerOptions& options,
                std::uint64_t seed) {
  const auto start_time = std::chrono::steady_clock::now();
  const auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  };

  PlanResult result;

  const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
  std::vector<FeasibilityField> fields;
  fields.reserve(scenario.objects.size());
  for (const ObjectState& object : scenario.objects)
    fields.push_back(build_field(object, occ, scenario.map.resolution, options.feasibility));

  PathCache paths(occ, scenario.map.resolution);
  const Cell start_cell = scenario.map.pose_to_cell(scenario.robot_start);
  if (occ.in_bounds(start_cell) && !occ.at(start_cell)) paths.add_source_field(start_cell);

  const StateSpace base = base_voronoi(scenario, occ, options.feasibility);

  const bool merged_modes = mode == PlannerMode::S3O_GROP_STAR || mode == PlannerMode::S3O_GROP ||
                            mode == PlannerMode::S3O_RANDOM;
  std::vector<StateSpace> candidates;
  if (merged_modes)
    candidates = enumerate_candidates(base, adjacency(base), options.limits);
  else
    candidates.push_back(base);
  result.diagnostics.candidates_enumerated = static_cast<int>(candidates.size());

  // Pick which candidates get pose optimization.
  std::vector<int> chosen;
  if (mode == PlannerMode::S3O_GROP_STAR || mode == PlannerMode::S3O_GROP) {
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const StateSpace& candidate : candidates)
      scores.push_back(
          score_state_space(candidate, fields, options.feasibility, derive_seed(seed, kScoreSalt)));
    result.diagnostics.candidates_scored = static_cast<int>(candidates.size());

    const CandidateSet ranked = rank_and_select(candidates, scores, options.top_k);
    Rng rng(derive_seed(seed, kDrawSalt));
    for (int draw = 0; draw < options.candidate_draws; ++draw) {
      const double pick = rng.uniform();
      double cumulative = 0.0;
      size_t index = ranked.candidates.size() - 1;
      for (size_t i = 0; i < ranked.selection_weights.size(); ++i) {
        cumulative += ranked.selection_weights[i];
        if (pick < cumulative) {
          index = i;
          break;
        }
      }
      chosen.push_back(ranked.candidates[index].id);
    }
  } else if (mode == PlannerMode::S3O_RANDOM) {
    // The ablation commits to one task planner drawn uniformly from the
    // full candidate set, with no score ranking and no cross-candidate
    // rescue: what the ranking step buys is exactly what this mode forgoes.
    Rng rng(derive_seed(seed, kDrawSalt));
    chosen.push_back(candidates[rng.uniform_int(candidates.size())].id);
  } else {
    chosen.push_back(base.id);
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  result.diagnostics.candidates_drawn = static_cast<int>(chosen.size());

  // Expand into independent (candidate, sequence) work items.
  std::vector<WorkItem> items;
  for (int candidate_id : chosen) {
    const StateSpace& candidate = candidates[candidate_id];
    const SymbolicState init = initial_state(candidate);
    const std::vector<TaskSequence> sequences =
        enumerate_sequences(candidate, init, scenario.robot_start, options.sequence_limit);
    for (size_t s = 0; s < sequences.size(); ++s) {
      WorkItem item;
      item.candidate = &candidate;
      item.sequence = sequences[s];
      item.sequence_index = static_cast<int>(s);
      item.seed = derive_seed(derive_seed(seed, kItemSalt), items.size());
      items.push_back(std::move(item));
    }
  }

  std::vector<ItemResult> results(items.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> out_of_time{false};

  const auto run_item = [&](size_t index) {
    const WorkItem& item = items[index];
    ItemResult& out = results[index];
    out.evaluated = true;
    try {
      GroundedPlan plan;
      if (mode == PlannerMode::S3O_GROP_STAR || mode == PlannerMode::V_GROP_STAR ||
          mode == PlannerMode::S3O_RANDOM) {
        plan = optimize_sequence(item.sequence, scenario, *item.candidate, occ, fields, options,
                                 paths, item.seed, &out.samples);
      } else {
        const bool weighted = mode != PlannerMode::V_PETLON;
        const bool efficiency_only = mode == PlannerMode::V_PETLON;
        plan = sample_best_of_budget(item.sequence, scenario, *item.candidate, occ, fields,
                                     options, paths, item.seed, weighted, efficiency_only,
                                     &out.samples);
      }
      plan.sequence_id = item.sequence_index;
      out.feasible = true;
      if (mode == PlannerMode::V_PETLON) {
        double value = 0.0;
        for (const PlanStep& step : plan.steps) value -= action_cost(step, options.cost);
        out.selection = value - options.cost.lambda * plan.location_violations;
      } else {
        out.selection = plan.objective;
      }
      out.plan = std::move(plan);
    } catch (const InfeasibleSequence&) {
      out.feasible = false;
    }
  };
  const auto worker = [&]() {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= items.size()) return;
      if (elapsed() > options.cost.time_budget) {
        out_of_time.store(true);
        results[index].evaluated = false;
        continue;
      }
      run_item(index);
    }
  };

  if (options.workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int count = std::min<int>(options.workers, std::max<size_t>(items.size(), 1));
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Deterministic reduction in item order.
  double best_selection = kNegInf;
  int best_index = -1;
  for (size_t i = 0; i < results.size(); ++i) {
    const ItemResult& r = results[i];
    if (!r.evaluated) continue;
    ++result.diagnostics.sequences_optimized;
    result.diagnostics.samples_spent += r.samples;
    if (!r.feasible) continue;
    result.diagnostics.incumbents.push_back({r.plan.state_space_id, r.plan.sequence_id,
                                             r.plan.objective, r.plan.utility});
    if (r.selection > best_selection) {
      best_selection = r.selection;
      best_index = static_cast<int>(i);
    }
  }
  result.diagnostics.partial = out_of_time.load();
  result.diagnostics.planning_seconds = elapsed();
  if (best_index >= 0) {
    result.found = true;
    result.plan = results[best_index].plan;
  }
  return result;
}

std::string render_plan(const GroundedPlan& plan, PlannerMode mode, std::uint64_t seed,
                        bool found) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "mode: " << mode_name(mode) << "\n";
  out << "seed: " << seed << "\n";
  if (!found) {
    out << "plan: none\n";
    return out.str();
  }
  out << "state_space: " << plan.state_space_id << "\n";
  out << "sequence: " << plan.sequence_id << "\n";
  out << "utility: " << plan.utility << "\n";
  out << "objective: " << plan.objective << "\n";
  out << "steps: " << plan.steps.size() << "\n";
  for (const PlanStep& step : plan.steps) {
    if (step.kind == PlanStep::Kind::Nav)
      out << "  nav from (" << step.from.x << ", " << step.from.y << ") to (" << step.to.x
          << ", " << step.to.y << ") length " << step.length << "\n";
    else
      out << "  pick o" << step.object + 1 << " at (" << step.robot_pose.x << ", "
          << step.robot_pose.y << ") feasibility " << step.feasibility << "\n";
  }
  return out.str();
}

}  // namespace s3o
