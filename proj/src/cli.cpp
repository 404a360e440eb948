#include "s3o/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "s3o/errors.hpp"
#include "s3o/rng.hpp"

namespace s3o {

namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string strip_extension(const std::string& path) {
  const fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

constexpr const char* kSummaryHeader =
    "mode,group,mean_completion,std_completion,mean_time,std_time,trials\n";
constexpr const char* kDetailHeader = "mode,scenario_seed,group,trial,completion,time\n";

}  // namespace

std::string config_echo(const PlannerOptions& options, const NoiseModel& noise) {
  std::ostringstream out;
  out << "v: " << options.cost.v << "\n";
  out << "gamma: " << options.cost.gamma << "\n";
  out << "delta: " << options.cost.delta << "\n";
  out << "lambda: " << options.cost.lambda << "\n";
  out << "time_budget: " << options.cost.time_budget << "\n";
  out << "sample_budget: " << options.cost.sample_budget << "\n";
  out << "reach_min: " << options.feasibility.reach_min << "\n";
  out << "reach_full_lo: " << options.feasibility.reach_full_lo << "\n";
  out << "reach_full_hi: " << options.feasibility.reach_full_hi << "\n";
  out << "reach_max: " << options.feasibility.reach_max << "\n";
  out << "feasibility_samples: " << options.feasibility.sample_count << "\n";
  out << "max_group_size: " << options.limits.max_group_size << "\n";
  out << "max_candidates: " << options.limits.max_candidates << "\n";
  out << "single_merge_only: " << (options.limits.single_merge_only ? 1 : 0) << "\n";
  out << "top_k: " << options.top_k << "\n";
  out << "candidate_draws: " << options.candidate_draws << "\n";
  out << "sequence_limit: " << options.sequence_limit << "\n";
  out << "cma_population: " << options.cma_population << "\n";
  out << "cma_generations: " << options.cma_generations << "\n";
  out << "pose_per_object: " << (options.pose_per_object ? 1 : 0) << "\n";
  out << "workers: " << options.workers << "\n";
  out << "nav_sigma: " << noise.nav_sigma << "\n";
  out << "reach_sigma: " << noise.reach_sigma << "\n";
  return out.str();
}

std::vector<std::string> list_scenarios(const std::string& dir) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) return paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("scenario_", 0) == 0 && entry.path().extension() == ".txt")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

int cmd_gen(std::uint64_t seed, int count, const std::string& out_dir, bool overwrite,
            const GeneratorConfig& config, std::ostream& err) {
  try {
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
      const std::uint64_t scenario_seed = seed + static_cast<std::uint64_t>(i);
      const fs::path path =
          fs::path(out_dir) / ("scenario_" + std::to_string(scenario_seed) + ".txt");
      if (fs::exists(path) && !overwrite) {
        err << "refusing to overwrite " << path.string() << " (pass --overwrite)\n";
        return 1;
      }
      const Scenario scenario = generate_scenario(scenario_seed, config);
      save_scenario(scenario, path.string());
    }
    write_text((fs::path(out_dir) / "gen.config").string(),
               config_echo(PlannerOptions{}, NoiseModel{}));
    return 0;
  } catch (const std::exception& e) {
    err << "gen: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plan(const std::string& scenario_path, const std::string& mode_name_str,
             std::uint64_t seed, const std::string& out_path, bool emit_heatmaps,
             const PlannerOptions& options, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(scenario_path);
    const PlannerMode mode = mode_from_name(mode_name_str);
    const PlanResult result = plan(scenario, mode, options, seed);

    write_text(out_path, render_plan(result.plan, mode, seed, result.found));
    write_text(out_path + ".config", config_echo(options, NoiseModel{}));
    err << "planning took " << result.diagnostics.planning_seconds << " s ("
        << result.diagnostics.sequences_optimized << " sequences, "
        << result.diagnostics.samples_spent << " samples)\n";

    if (emit_heatmaps) {
      const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
      const std::string stem = strip_extension(out_path);
      for (size_t i = 0; i < scenario.objects.size(); ++i) {
        const FeasibilityField field =
            build_field(scenario.objects[i], occ, scenario.map.resolution, options.feasibility);
        write_pgm(field.values, stem + "_o" + std::to_string(i + 1) + ".pgm");
      }
      write_ppm(base_voronoi(scenario, occ, options.feasibility), stem + "_partition.ppm");
    }
    return result.found ? 0 : 2;
  } catch (const std::exception& e) {
    err << "plan: " << e.what() << "\n";
    return 1;
  }
}

int cmd_exec(const std::string& scenario_path, const std::string& mode_name_str,
             std::uint64_t seed, int trials, const std::string& out_path,
             const PlannerOptions& options, const NoiseModel& noise, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(scenario_path);
    const PlannerMode mode = mode_from_name(mode_name_str);
    const PlanResult result = plan(scenario, mode, options, derive_seed(seed, 0));
    if (!result.found) {
      err << "exec: no feasible plan\n";
      return 2;
    }

    const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
    PathCache paths(occ, scenario.map.resolution);
    std::ostringstream rows;
    rows << kDetailHeader;
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(derive_seed(seed, 1), t));
      const ExecutionResult trial =
          execute(result.plan, scenario, occ, options.feasibility, noise, options.cost, paths, rng);
      rows << mode_name(mode) << "," << scenario.seed << ",all," << t << ",";
      rows.setf(std::ios::fixed);
      rows.precision(6);
      rows << trial.completion_rate << "," << trial.execution_time << "\n";
      rows.unsetf(std::ios::fixed);
    }
    write_text(out_path, rows.str());
    write_text(out_path + ".config", config_echo(options, noise));
    return 0;
  } catch (const std::exception& e) {
    err << "exec: " << e.what() << "\n";
    return 1;
  }
}

int cmd_experiment(const std::string& scenario_dir, const std::vector<std::string>& mode_names,
                   int trials, std::uint64_t seed, const std::string& out_csv,
                   const PlannerOptions& options, const NoiseModel& noise, std::ostream& err) {
  try {
    const std::vector<std::string> paths = list_scenarios(scenario_dir);
    if (paths.empty()) {
      err << "experiment: no scenario_*.txt files in " << scenario_dir << "\n";
      return 1;
    }
    std::vector<Scenario> batch;
    batch.reserve(paths.size());
    for (const std::string& path : paths) batch.push_back(load_scenario(path));

    std::vector<PlannerMode> modes;
    for (const std::string& name : mode_names) modes.push_back(mode_from_name(name));

    // Completed modes are journaled so an interrupted sweep resumes without
    // recomputation; per-mode seeds depend only on the mode, so resumed and
    // fresh runs produce identical bytes.
    const std::string journal_path = out_csv + ".journal";
    std::set<std::string> done;
    if (fs::exists(journal_path)) {
      std::istringstream in(read_text(journal_path));
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) done.insert(line);
    }

    const std::string stem = strip_extension(out_csv);
    for (PlannerMode mode : modes) {
      const std::string name = mode_name(mode);
      const std::string fragment = stem + "." + name + ".summary";
      const std::string detail = stem + "_" + name + "_detail.csv";
      if (done.count(name) && fs::exists(fragment) && fs::exists(detail)) continue;

      const std::uint64_t mode_seed =
          derive_seed(seed, static_cast<std::uint64_t>(mode) + 1);
      const EvaluationTable table =
          evaluate(mode, batch, trials, options, noise, mode_seed, options.workers);
      write_text(fragment, summary_csv(mode, table));
      write_text(detail, detail_csv(mode, table));

      std::ofstream journal(journal_path, std::ios::app);
      journal << name << "\n";
      err << "experiment: finished " << name << "\n";
    }

    std::string summary = kSummaryHeader;
    for (PlannerMode mode : modes) {
      // Fragments are self-headed; keep a single header in the composite.
      const std::string block = read_text(stem + "." + std::string(mode_name(mode)) + ".summary");
      const auto first_newline = block.find('\n');
      summary += block.substr(first_newline == std::string::npos ? 0 : first_newline + 1);
    }
    write_text(out_csv, summary);
    write_text(out_csv + ".config", config_echo(options, noise));
    return 0;
  } catch (const std::exception& e) {
    err << "experiment: " << e.what() << "\n";
    return 1;
  }
}

int cmd_score(const std::string& scenario_path, std::uint64_t seed, const std::string& out_path,
              const PlannerOptions& options, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(scenario_path);
    const OccupancyGrid occ = effective_occupancy(scenario.map, scenario.chairs);
    std::vector<FeasibilityField> fields;
    for (const ObjectState& object : scenario.objects)
      fields.push_back(build_field(object, occ, scenario.map.resolution, options.feasibility));

    const StateSpace base = base_voronoi(scenario, occ, options.feasibility);
    const std::vector<StateSpace> candidates =
        enumerate_candidates(base, adjacency(base), options.limits);
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const StateSpace& candidate : candidates)
      scores.push_back(score_state_space(candidate, fields, options.feasibility, seed));

    const CandidateSet ranked = rank_and_select(candidates, scores, options.top_k);
    std::ostringstream out;
    out << candidate_report(candidates, scores);
    out << "top " << ranked.candidates.size() << ":";
    for (size_t i = 0; i < ranked.candidates.size(); ++i) {
      out << " " << ranked.candidates[i].id << " (weight ";
      out.setf(std::ios::fixed);
      out.precision(4);
      out << ranked.selection_weights[i];
      out.unsetf(std::ios::fixed);
      out << ")";
    }
    out << "\n";
    write_text(out_path, out.str());
    write_text(out_path + ".config", config_echo(options, NoiseModel{}));
    return 0;
  } catch (const std::exception& e) {
    err << "score: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace s3o
