#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "s3o/executor.hpp"
#include "s3o/planner.hpp"
#include "s3o/world.hpp"

namespace s3o {

// Command implementations behind the CLI front end. Each returns a process
// exit code: 0 success, 1 input/config error, 2 no plan found. Progress and
// errors go to `err`; primary outputs are files, so runs stay byte-stable.

int cmd_gen(std::uint64_t seed, int count, const std::string& out_dir, bool overwrite,
            const GeneratorConfig& config, std::ostream& err);

int cmd_plan(const std::string& scenario_path, const std::string& mode_name, std::uint64_t seed,
             const std::string& out_path, bool emit_heatmaps, const PlannerOptions& options,
             std::ostream& err);

int cmd_exec(const std::string& scenario_path, const std::string& mode_name, std::uint64_t seed,
             int trials, const std::string& out_path, const PlannerOptions& options,
             const NoiseModel& noise, std::ostream& err);

int cmd_experiment(const std::string& scenario_dir, const std::vector<std::string>& mode_names,
                   int trials, std::uint64_t seed, const std::string& out_csv,
                   const PlannerOptions& options, const NoiseModel& noise, std::ostream& err);

int cmd_score(const std::string& scenario_path, std::uint64_t seed, const std::string& out_path,
              const PlannerOptions& options, std::ostream& err);

// Fully resolved configuration (defaults plus overrides), written next to
// every command's outputs.
std::string config_echo(const PlannerOptions& options, const NoiseModel& noise);

// scenario_*.txt files under dir, sorted by filename.
std::vector<std::string> list_scenarios(const std::string& dir);

}  // namespace s3o
