// Command-line front end: scenario generation, planning, execution,
// experiment sweeps, and candidate score reports.

#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "s3o/cli.hpp"

namespace {

void add_planner_flags(CLI::App* cmd, s3o::PlannerOptions& options) {
  cmd->add_option("--v", options.cost.v, "Robot speed, m/s");
  cmd->add_option("--gamma", options.cost.gamma, "Navigation start cost");
  cmd->add_option("--delta", options.cost.delta, "Manipulation cost");
  cmd->add_option("--lambda", options.cost.lambda, "Pickup reward bonus");
  cmd->add_option("--time-budget", options.cost.time_budget, "Planning wall-clock budget, s");
  cmd->add_option("--sample-budget", options.cost.sample_budget,
                  "Motion-level samples per sequence");
  cmd->add_option("--reach-min", options.feasibility.reach_min, "Reach kernel lower cutoff, m");
  cmd->add_option("--reach-full-lo", options.feasibility.reach_full_lo,
                  "Reach kernel full-feasibility band start, m");
  cmd->add_option("--reach-full-hi", options.feasibility.reach_full_hi,
                  "Reach kernel full-feasibility band end, m");
  cmd->add_option("--reach-max", options.feasibility.reach_max, "Reach kernel upper cutoff, m");
  cmd->add_option("--feasibility-samples", options.feasibility.sample_count,
                  "Samples behind each task-level feasibility estimate");
  cmd->add_option("--max-group-size", options.limits.max_group_size,
                  "Largest merged region group");
  cmd->add_option("--max-candidates", options.limits.max_candidates,
                  "State-space candidate cap");
  cmd->add_flag("--single-merge", options.limits.single_merge_only,
                "Only consider single pairwise merges");
  cmd->add_option("--top-k", options.top_k, "Candidates kept after ranking");
  cmd->add_option("--candidate-draws", options.candidate_draws,
                  "Task planners sampled per run");
  cmd->add_option("--sequence-limit", options.sequence_limit,
                  "Task-level sequences per candidate");
  cmd->add_option("--cma-population", options.cma_population, "CMA-ES population size");
  cmd->add_option("--cma-generations", options.cma_generations, "CMA-ES generation cap");
  cmd->add_flag("--pose-per-object", options.pose_per_object,
                "Sample one pose per object instead of per location visit");
  cmd->add_option("--workers", options.workers, "Worker threads")->envname("S3O_WORKERS");
}

void add_noise_flags(CLI::App* cmd, s3o::NoiseModel& noise) {
  cmd->add_option("--nav-sigma", noise.nav_sigma, "Navigation landing noise std, m");
  cmd->add_option("--reach-sigma", noise.reach_sigma, "End-effector placement noise std, m");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-horizon mobile pick-up planning toolkit"};
  app.require_subcommand(1);

  s3o::PlannerOptions options;
  options.workers = std::max(1u, std::thread::hardware_concurrency());
  s3o::NoiseModel noise;
  s3o::GeneratorConfig gen_config;

  std::uint64_t seed = 0;
  int count = 1;
  int trials = 50;
  std::string scenario_path, out_path, mode = "s3o-grop-star", scenario_dir;
  std::vector<std::string> modes;
  bool overwrite = false, emit_heatmaps = false;

  CLI::App* gen = app.add_subcommand("gen", "Generate scenario files");
  gen->add_option("--seed", seed, "Base seed")->envname("S3O_SEED");
  gen->add_option("--count", count, "Number of scenarios");
  gen->add_option("--out", out_path, "Output directory")->required();
  gen->add_flag("--overwrite", overwrite, "Replace existing scenario files");
  gen->add_option("--resolution", gen_config.resolution, "Grid resolution, m/cell");
  gen->add_option("--objects-min", gen_config.object_count_min, "Minimum object count");
  gen->add_option("--objects-max", gen_config.object_count_max, "Maximum object count");
  gen->add_option("--chairs-per-object", gen_config.chairs_per_object, "Chairs per object");

  CLI::App* plan = app.add_subcommand("plan", "Plan one scenario");
  plan->add_option("--scenario", scenario_path, "Scenario file")->required();
  plan->add_option("--mode", mode, "Planner mode");
  plan->add_option("--seed", seed, "Planner seed")->envname("S3O_SEED");
  plan->add_option("--out", out_path, "Plan output file")->required();
  plan->add_flag("--emit-heatmaps", emit_heatmaps,
                 "Write per-object feasibility PGMs and the partition PPM");
  add_planner_flags(plan, options);

  CLI::App* exec = app.add_subcommand("exec", "Plan and execute trials");
  exec->add_option("--scenario", scenario_path, "Scenario file")->required();
  exec->add_option("--mode", mode, "Planner mode");
  exec->add_option("--seed", seed, "Run seed")->envname("S3O_SEED");
  exec->add_option("--trials", trials, "Execution trials")->envname("S3O_TRIALS");
  exec->add_option("--out", out_path, "Trial CSV output")->required();
  add_planner_flags(exec, options);
  add_noise_flags(exec, noise);

  CLI::App* experiment = app.add_subcommand("experiment", "Sweep scenarios x modes x trials");
  experiment->add_option("--scenarios", scenario_dir, "Directory of scenario files")->required();
  experiment->add_option("--modes", modes, "Planner modes")->delimiter(',');
  experiment->add_option("--trials", trials, "Trials per scenario")->envname("S3O_TRIALS");
  experiment->add_option("--seed", seed, "Sweep seed")->envname("S3O_SEED");
  experiment->add_option("--out", out_path, "Summary CSV path")->required();
  add_planner_flags(experiment, options);
  add_noise_flags(experiment, noise);

  CLI::App* score = app.add_subcommand("score", "Candidate ranking report");
  score->add_option("--scenario", scenario_path, "Scenario file")->required();
  score->add_option("--seed", seed, "Scoring seed")->envname("S3O_SEED");
  score->add_option("--out", out_path, "Report output file")->required();
  add_planner_flags(score, options);

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return s3o::cmd_gen(seed, count, out_path, overwrite, gen_config, std::cerr);
  if (plan->parsed())
    return s3o::cmd_plan(scenario_path, mode, seed, out_path, emit_heatmaps, options, std::cerr);
  if (exec->parsed())
    return s3o::cmd_exec(scenario_path, mode, seed, trials, out_path, options, noise, std::cerr);
  if (experiment->parsed()) {
    if (modes.empty())
      for (s3o::PlannerMode m : s3o::all_modes()) modes.push_back(s3o::mode_name(m));
    return s3o::cmd_experiment(scenario_dir, modes, trials, seed, out_path, options, noise,
                               std::cerr);
  }
  if (score->parsed()) return s3o::cmd_score(scenario_path, seed, out_path, options, std::cerr);
  return 1;
}
