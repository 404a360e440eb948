#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "s3o/cli.hpp"

using namespace s3o;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("s3o_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& name = "") const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// Small, fast planner configuration for CLI round trips.
PlannerOptions quick_options() {
  PlannerOptions options;
  options.cma_population = 8;
  options.cma_generations = 4;
  options.cost.sample_budget = 32;
  options.workers = 1;
  return options;
}

GeneratorConfig quick_gen() {
  GeneratorConfig config;
  config.resolution = 0.1;
  return config;
}

}  // namespace

TEST_CASE("gen writes one file per seed and refuses to clobber") {
  TempDir dir("gen");
  std::ostringstream err;
  REQUIRE(cmd_gen(500, 3, dir.str(), false, quick_gen(), err) == 0);
  CHECK(fs::exists(dir.str("scenario_500.txt")));
  CHECK(fs::exists(dir.str("scenario_501.txt")));
  CHECK(fs::exists(dir.str("scenario_502.txt")));
  CHECK(fs::exists(dir.str("gen.config")));

  const Scenario back = load_scenario(dir.str("scenario_501.txt"));
  CHECK(back.seed == 501);

  // Existing files are refused without --overwrite...
  std::ostringstream err2;
  CHECK(cmd_gen(500, 1, dir.str(), false, quick_gen(), err2) == 1);
  CHECK(err2.str().find("scenario_500.txt") != std::string::npos);

  // ...and replaced byte-identically with it (same seed, same content).
  const std::string before = slurp(dir.str("scenario_500.txt"));
  CHECK(cmd_gen(500, 1, dir.str(), true, quick_gen(), err) == 0);
  CHECK(slurp(dir.str("scenario_500.txt")) == before);
}

TEST_CASE("scenario listing is sorted and filtered") {
  TempDir dir("list");
  std::ostringstream err;
  REQUIRE(cmd_gen(610, 3, dir.str(), false, quick_gen(), err) == 0);
  std::ofstream(dir.str("notes.txt")) << "not a scenario\n";
  const auto files = list_scenarios(dir.str());
  REQUIRE(files.size() == 3);
  CHECK(files[0].find("scenario_610.txt") != std::string::npos);
  CHECK(files[2].find("scenario_612.txt") != std::string::npos);
}

TEST_CASE("plan writes the plan file, config echo, and optional heatmaps") {
  TempDir dir("plan");
  std::ostringstream err;
  REQUIRE(cmd_gen(520, 1, dir.str(), false, quick_gen(), err) == 0);
  const std::string scenario = dir.str("scenario_520.txt");

  const int rc = cmd_plan(scenario, "s3o-grop-star", 9, dir.str("plan.txt"), true,
                          quick_options(), err);
  REQUIRE(rc == 0);
  const std::string plan_text = slurp(dir.str("plan.txt"));
  CHECK(plan_text.find("mode: s3o-grop-star") != std::string::npos);
  CHECK(plan_text.find("seed: 9") != std::string::npos);
  CHECK(plan_text.find("utility:") != std::string::npos);
  CHECK(plan_text.find("nav from") != std::string::npos);
  CHECK(plan_text.find("pick o") != std::string::npos);
  CHECK(slurp(dir.str("plan.txt.config")).find("cma_population: 8") != std::string::npos);

  // One heatmap per object plus the base partition image.
  const Scenario s = load_scenario(scenario);
  for (size_t i = 1; i <= s.objects.size(); ++i)
    CHECK(fs::exists(dir.str("plan_o" + std::to_string(i) + ".pgm")));
  CHECK(fs::exists(dir.str("plan_partition.ppm")));

  // Determinism: replanning with the same seed reproduces the bytes.
  REQUIRE(cmd_plan(scenario, "s3o-grop-star", 9, dir.str("plan2.txt"), false, quick_options(),
                   err) == 0);
  CHECK(slurp(dir.str("plan2.txt")) == plan_text);

  // Unknown mode and missing file map to exit code 1.
  CHECK(cmd_plan(scenario, "warp-drive", 9, dir.str("x.txt"), false, quick_options(), err) == 1);
  CHECK(cmd_plan(dir.str("absent.txt"), "v-grop", 9, dir.str("y.txt"), false, quick_options(),
                 err) == 1);
}

TEST_CASE("exec writes one trial row per rollout") {
  TempDir dir("exec");
  std::ostringstream err;
  REQUIRE(cmd_gen(530, 1, dir.str(), false, quick_gen(), err) == 0);
  const int rc = cmd_exec(dir.str("scenario_530.txt"), "v-grop", 4, 5, dir.str("trials.csv"),
                          quick_options(), {}, err);
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir.str("trials.csv"));
  CHECK(csv.find("mode,scenario_seed,group,trial,completion,time\n") == 0);
  CHECK(count_lines(csv) == 6);  // header + 5 trials
  CHECK(csv.find("v-grop,530,all,0,") != std::string::npos);
  CHECK(csv.find("v-grop,530,all,4,") != std::string::npos);
  CHECK(fs::exists(dir.str("trials.csv.config")));
}

TEST_CASE("experiment composes per-mode fragments into one summary") {
  TempDir dir("exp");
  std::ostringstream err;
  REQUIRE(cmd_gen(540, 3, dir.str(), false, quick_gen(), err) == 0);
  const std::string out = dir.str("results.csv");
  const std::vector<std::string> modes{"v-grop", "v-petlon"};

  REQUIRE(cmd_experiment(dir.str(), modes, 2, 77, out, quick_options(), {}, err) == 0);
  const std::string summary = slurp(out);
  CHECK(summary.find("mode,group,mean_completion") == 0);
  CHECK(count_lines(summary) == 1 + 2 * 3);  // header + 2 modes x 3 groups
  CHECK(summary.find("v-grop,easy,") != std::string::npos);
  CHECK(summary.find("v-petlon,difficult,") != std::string::npos);
  // Exactly one header line in the composite.
  CHECK(summary.rfind("mode,group,mean_completion") == 0);

  const std::string detail = slurp(dir.str("results_v-grop_detail.csv"));
  CHECK(count_lines(detail) == 1 + 3 * 2);  // header + 3 scenarios x 2 trials
  CHECK(fs::exists(dir.str("results.csv.journal")));
  CHECK(fs::exists(dir.str("results.csv.config")));
}

TEST_CASE("experiment resumes from the journal without changing bytes") {
  TempDir dir("resume");
  std::ostringstream err;
  REQUIRE(cmd_gen(550, 2, dir.str(), false, quick_gen(), err) == 0);
  const std::string out = dir.str("results.csv");

  // Run the first mode alone: journal remembers it.
  REQUIRE(cmd_experiment(dir.str(), {"v-grop"}, 2, 5, out, quick_options(), {}, err) == 0);
  const std::string first_fragment = slurp(dir.str("results.v-grop.summary"));

  // A fresh run over both modes from scratch, in a second directory, is the
  // reference for what the resumed run must produce.
  TempDir ref("resume_ref");
  std::ostringstream err2;
  REQUIRE(cmd_gen(550, 2, ref.str(), false, quick_gen(), err2) == 0);
  REQUIRE(cmd_experiment(ref.str(), {"v-grop", "v-petlon"}, 2, 5, ref.str("results.csv"),
                         quick_options(), {}, err2) == 0);

  // Resume: the journaled mode is skipped (its fragment survives untouched),
  // the missing mode is computed, and the composite matches the fresh run.
  REQUIRE(cmd_experiment(dir.str(), {"v-grop", "v-petlon"}, 2, 5, out, quick_options(), {}, err) ==
          0);
  CHECK(slurp(dir.str("results.v-grop.summary")) == first_fragment);
  CHECK(slurp(out) == slurp(ref.str("results.csv")));
  CHECK(err.str().find("finished v-petlon") != std::string::npos);
}

TEST_CASE("experiment worker count never changes output bytes") {
  TempDir dir("workers");
  std::ostringstream err;
  REQUIRE(cmd_gen(560, 3, dir.str(), false, quick_gen(), err) == 0);

  auto options = quick_options();
  options.workers = 1;
  REQUIRE(cmd_experiment(dir.str(), {"s3o-grop-star"}, 2, 6, dir.str("one.csv"), options, {},
                         err) == 0);
  options.workers = 8;
  REQUIRE(cmd_experiment(dir.str(), {"s3o-grop-star"}, 2, 6, dir.str("eight.csv"), options, {},
                         err) == 0);
  CHECK(slurp(dir.str("one.csv")) == slurp(dir.str("eight.csv")));
  CHECK(slurp(dir.str("one_s3o-grop-star_detail.csv")) ==
        slurp(dir.str("eight_s3o-grop-star_detail.csv")));
}

TEST_CASE("score lists candidates with their weights") {
  TempDir dir("score");
  std::ostringstream err;
  REQUIRE(cmd_gen(570, 1, dir.str(), false, quick_gen(), err) == 0);
  REQUIRE(cmd_score(dir.str("scenario_570.txt"), 3, dir.str("scores.txt"), quick_options(),
                    err) == 0);
  const std::string report = slurp(dir.str("scores.txt"));
  CHECK(report.find("candidate 0:") != std::string::npos);
  CHECK(report.find("score") != std::string::npos);
  CHECK(report.find("top") != std::string::npos);
  CHECK(fs::exists(dir.str("scores.txt.config")));
}

TEST_CASE("config echo resolves every knob") {
  const auto options = quick_options();
  const std::string echo = config_echo(options, {});
  for (const char* key :
       {"v: ", "gamma: ", "delta: ", "lambda: ", "time_budget: ", "sample_budget: ",
        "reach_min: ", "reach_full_lo: ", "reach_full_hi: ", "reach_max: ",
        "feasibility_samples: ", "max_group_size: ", "max_candidates: ", "top_k: ",
        "candidate_draws: ", "sequence_limit: ", "cma_population: ", "cma_generations: ",
        "workers: ", "nav_sigma: ", "reach_sigma: "}) {
    INFO(key);
    CHECK(echo.find(key) != std::string::npos);
  }
}
