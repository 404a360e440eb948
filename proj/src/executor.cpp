#include "s3o/executor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "s3o/rng.hpp"

namespace s3o {

ExecutionResult execute(const GroundedPlan& plan, const Scenario& scenario,
                        const OccupancyGrid& occ, const FeasibilityParams& fea_params,
                        const NoiseModel& noise, const CostParams& params, PathCache& paths,
                        Rng& rng) {
  ExecutionResult result;
  result.per_object_success.assign(scenario.objects.size(), false);

  const auto blocked = [&](const Pose2D& p) {
    const Cell c = scenario.map.pose_to_cell(p);
    return !occ.in_bounds(c) || occ.at(c) != 0;
  };

  Pose2D current = scenario.robot_start;
  for (const PlanStep& step : plan.steps) {
    if (step.kind == PlanStep::Kind::Nav) {
      Pose2D landing = step.to;
      if (noise.nav_sigma > 0.0) {
        bool placed = false;
        for (int attempt = 0; attempt < 10 && !placed; ++attempt) {
          const Pose2D candidate{step.to.x + rng.normal(0.0, noise.nav_sigma),
                                 step.to.y + rng.normal(0.0, noise.nav_sigma)};
          if (!blocked(candidate)) {
            landing = candidate;
            placed = true;
          }
        }
        if (!placed) landing = step.to;  // the planned goal is always free
      }
      double length = distance(current, landing);
      if (!blocked(current) && !blocked(landing)) {
        const auto via_grid =
            paths.length(scenario.map.pose_to_cell(current), scenario.map.pose_to_cell(landing));
        if (via_grid) length = *via_grid;
      }
      result.execution_time += length / params.v + params.gamma;
      current = landing;
      result.realized_poses.push_back(current);
    } else {
      result.execution_time += params.delta;
      result.realized_poses.push_back(current);
      const double feasibility =
          motion_feasibility(current, step.object_pose, occ, scenario.map.resolution, fea_params);
      double degradation = 1.0;
      if (noise.reach_sigma > 0.0) {
        const double reach_error = std::abs(rng.normal(0.0, noise.reach_sigma));
        degradation =
            std::exp(-reach_error * reach_error / (2.0 * noise.reach_sigma * noise.reach_sigma * 25.0));
      }
      const double success_probability = feasibility * degradation;
      if (rng.uniform() < success_probability) result.per_object_success[step.object] = true;
    }
  }

  if (!scenario.objects.empty()) {
    int successes = 0;
    for (bool s : result.per_object_success)
      if (s) ++successes;
    result.completion_rate = static_cast<double>(successes) / scenario.objects.size();
  }
  return result;
}

double feasible_standing_area(const Scenario& scenario) {
  const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
  const FeasibilityParams params;

  // Reachability from the robot start over free cells.
  Grid<unsigned char> reachable(occ.width(), occ.height(), 0);
  const Cell start = scenario.map.pose_to_cell(scenario.robot_start);
  if (occ.in_bounds(start) && !occ.at(start)) {
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
  }

  long cells = 0;
  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x) {
      if (!reachable.at(x, y)) continue;
      const Pose2D center = scenario.map.cell_center({x, y});
      for (const ObjectState& object : scenario.objects) {
        if (motion_feasibility(center, object.position, occ, scenario.map.resolution, params) >
            0.0) {
          ++cells;
          break;
        }
      }
    }
  return cells * scenario.map.resolution * scenario.map.resolution;
}

const char* group_name(int group) {
  switch (group) {
    case 0: return "easy";
    case 1: return "moderate";
    case 2: return "difficult";
    default: return "all";
  }
}

EvaluationTable evaluate(PlannerMode mode, const std::vector<Scenario>& batch, int trials,
                         const PlannerOptions& options, const NoiseModel& noise,
                         std::uint64_t seed, int workers) {
  EvaluationTable table;
  table.per_scenario.resize(batch.size());

  // Difficulty terciles: larger feasible standing area = easier. Stable
  // sort keeps batch order among exact ties; remainders go to the easier
  // groups (e.g. 100 scenarios -> 34/33/33).
  std::vector<double> areas(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) areas[i] = feasible_standing_area(batch[i]);
  std::vector<int> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return areas[a] > areas[b]; });
  std::vector<int> group_of(batch.size(), 0);
  const int n = static_cast<int>(batch.size());
  const int base_size = n / 3, remainder = n % 3;
  int cursor = 0;
  for (int g = 0; g < 3; ++g) {
    const int size = base_size + (g < remainder ? 1 : 0);
    for (int i = 0; i < size && cursor < n; ++i, ++cursor) group_of[order[cursor]] = g;
  }

  const auto run_scenario = [&](size_t index) {
    const Scenario& scenario = batch[index];
    ScenarioOutcome& outcome = table.per_scenario[index];
    outcome.scenario_seed = scenario.seed;
    outcome.group = group_of[index];
    outcome.difficulty_area = areas[index];

    const std::uint64_t plan_seed = derive_seed(seed, 2 * index);
    const std::uint64_t trial_seed = derive_seed(seed, 2 * index + 1);
    const PlanResult planned = plan(scenario, mode, options, plan_seed);
    outcome.plan_found = planned.found;
    outcome.plan_objective = planned.found ? planned.plan.objective : 0.0;
    if (!planned.found) {
      outcome.trial_completion.assign(trials, 0.0);
      outcome.trial_time.assign(trials, 0.0);
      return;
    }
    for (const PlanStep& step : planned.plan.steps)
      if (step.kind == PlanStep::Kind::Nav) ++outcome.nav_steps;

    const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
    PathCache paths(occ, scenario.map.resolution);
    double sum_completion = 0.0, sum_time = 0.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(trial_seed, t));
      const ExecutionResult trial = execute(planned.plan, scenario, occ, options.feasibility,
                                            noise, options.cost, paths, rng);
      outcome.trial_completion.push_back(trial.completion_rate);
      outcome.trial_time.push_back(trial.execution_time);
      sum_completion += trial.completion_rate;
      sum_time += trial.execution_time;
    }
    if (trials > 0) {
      outcome.mean_completion = sum_completion / trials;
      outcome.mean_time = sum_time / trials;
    }
  };

  if (workers <= 1) {
    for (size_t i = 0; i < batch.size(); ++i) run_scenario(i);
  } else {
    std::atomic<size_t> next{0};
    const auto worker = [&]() {
      while (true) {
        const size_t index = next.fetch_add(1);
        if (index >= batch.size()) return;
        run_scenario(index);
      }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, std::max<int>(n, 1));
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Group statistics over per-scenario means.
  for (int g = 0; g < 3; ++g) {
    GroupSummary summary;
    summary.group = g;
    std::vector<double> completions, times;
    for (const ScenarioOutcome& outcome : table.per_scenario) {
      if (outcome.group != g) continue;
      completions.push_back(outcome.mean_completion);
      times.push_back(outcome.mean_time);
      summary.trials += static_cast<int>(outcome.trial_completion.size());
    }
    summary.scenarios = static_cast<int>(completions.size());
    const auto mean = [](const std::vector<double>& xs) {
      return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    };
    const auto sample_std = [&](const std::vector<double>& xs, double m) {
      if (xs.size() < 2) return 0.0;
      double ss = 0.0;
      for (double x : xs) ss += (x - m) * (x - m);
      return std::sqrt(ss / (xs.size() - 1));
    };
    summary.mean_completion = mean(completions);
    summary.std_completion = sample_std(completions, summary.mean_completion);
    summary.mean_time = mean(times);
    summary.std_time = sample_std(times, summary.mean_time);
    table.groups.push_back(summary);
  }
  return table;
}

namespace {

std::string format_fixed(double value, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << value;
  return out.str();
}

}  // namespace

std::string summary_csv(PlannerMode mode, const EvaluationTable& table) {
  std::ostringstream out;
  out << "mode,group,mean_completion,std_completion,mean_time,std_time,trials\n";
  for (const GroupSummary& g : table.groups) {
    out << mode_name(mode) << "," << group_name(g.group) << ","
        << format_fixed(g.mean_completion, 6) << "," << format_fixed(g.std_completion, 6) << ","
        << format_fixed(g.mean_time, 6) << "," << format_fixed(g.std_time, 6) << "," << g.trials
        << "\n";
  }
  return out.str();
}

std::string detail_csv(PlannerMode mode, const EvaluationTable& table) {
  std::ostringstream out;
  out << "mode,scenario_seed,group,trial,completion,time\n";
  for (const ScenarioOutcome& s : table.per_scenario) {
    for (size_t t = 0; t < s.trial_completion.size(); ++t) {
      out << mode_name(mode) << "," << s.scenario_seed << "," << group_name(s.group) << "," << t
          << "," << format_fixed(s.trial_completion[t], 6) << ","
          << format_fixed(s.trial_time[t], 6) << "\n";
    }
  }
  return out.str();
}

}  // namespace s3o
