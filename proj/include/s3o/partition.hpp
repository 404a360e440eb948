#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "s3o/feasibility.hpp"
#include "s3o/grid.hpp"
#include "s3o/world.hpp"

namespace s3o {

// One symbolic location: the objects assigned to it and the grid cells it
// covers. Object references are indices into Scenario::objects throughout.
struct Location {
  std::vector<int> objects;
  std::vector<Cell> cells;
  std::vector<int> merged_from;  // base-region ids merged into this location
};

// A symbolic state space: locations, the per-cell labeling that realizes
// them, and the object -> location assignment.
struct StateSpace {
  int id = 0;  // index within its candidate enumeration
  std::vector<Location> locations;
  LabelGrid labels;  // location index per cell, -1 = unlabeled
  std::vector<int> object_location;
  double resolution = 0.05;
};

struct CandidateLimits {
  int max_group_size = 3;    // largest merged group of base regions
  int max_candidates = 200;  // deterministic truncation cap
  bool single_merge_only = false;
};

// The kept top-k candidates, best first, with normalized selection weights.
struct CandidateSet {
  std::vector<StateSpace> candidates;
  std::vector<double> scores;
  std::vector<double> selection_weights;
  int top_k = 5;
};

// Object-centric partition: a free cell is labeled iff it lies within
// params.reach_max of its nearest object, and it belongs to that object's
// location. Exact distance ties go to the lowest object index.
StateSpace base_voronoi(const Scenario& scenario, const OccupancyGrid& occ,
                        const FeasibilityParams& params);

// Undirected edges (i, j), i < j, between base locations with 8-adjacent
// cells, sorted lexicographically.
std::vector<std::pair<int, int>> adjacency(const StateSpace& base);

// All partitions of the base regions into connected groups of size at most
// limits.max_group_size, each group merged into one location. The unmerged
// base partition always comes first; remaining candidates are ordered by
// block count descending (fewest merges first), then by grouping string,
// and the list is truncated at limits.max_candidates.
std::vector<StateSpace> enumerate_candidates(const StateSpace& base,
                                             const std::vector<std::pair<int, int>>& edges,
                                             const CandidateLimits& limits = {});

// Accumulated task-level feasibility over all objects. Sampling noise is
// derived per (merged group, object) so a location shared between two
// candidates contributes the identical value to both.
double score_state_space(const StateSpace& ss, const std::vector<FeasibilityField>& fields,
                         const FeasibilityParams& params, std::uint64_t seed);

// Keeps the min(k, candidates) best-scored candidates (ties by enumeration
// order) and normalizes their scores into selection weights; an all-zero
// score vector falls back to uniform weights. Throws EmptySupport on an
// empty candidate list.
CandidateSet rank_and_select(const std::vector<StateSpace>& candidates,
                             const std::vector<double>& scores, int k);

// Indexed-color visualization of the labeling (binary PPM, fixed palette).
void write_ppm(const StateSpace& ss, const std::string& path);

// Plain-text candidate listing with scores, one line per candidate.
std::string candidate_report(const std::vector<StateSpace>& candidates,
                             const std::vector<double>& scores);

}  // namespace s3o
