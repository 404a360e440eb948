#include "s3o/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "s3o/errors.hpp"
#include "s3o/rng.hpp"

namespace s3o {

StateSpace base_voronoi(const Scenario& scenario, const OccupancyGrid& occ,
                        const FeasibilityParams& params) {
  if (scenario.objects.empty()) throw EmptySupport("voronoi partition needs at least one object");

  StateSpace ss;
  ss.id = 0;
  ss.resolution = scenario.map.resolution;
  ss.labels = LabelGrid(occ.width(), occ.height(), -1);
  ss.locations.resize(scenario.objects.size());
  ss.object_location.resize(scenario.objects.size());
  for (size_t i = 0; i < scenario.objects.size(); ++i) {
    ss.locations[i].objects = {static_cast<int>(i)};
    ss.locations[i].merged_from = {static_cast<int>(i)};
    ss.object_location[i] = static_cast<int>(i);
  }

  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x) {
      if (occ.at(x, y)) continue;
      const Pose2D center{(x + 0.5) * ss.resolution, (y + 0.5) * ss.resolution};
      int nearest = 0;
      double best = distance(center, scenario.objects[0].position);
      for (size_t i = 1; i < scenario.objects.size(); ++i) {
        const double d = distance(center, scenario.objects[i].position);
        if (d < best) {
          best = d;
          nearest = static_cast<int>(i);
        }
      }
      if (best <= params.reach_max) {
        ss.labels.at(x, y) = nearest;
        ss.locations[nearest].cells.push_back({x, y});
      }
    }
  return ss;
}

std::vector<std::pair<int, int>> adjacency(const StateSpace& base) {
  std::set<std::pair<int, int>> edges;
  const LabelGrid& labels = base.labels;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) {
      const int a = labels.at(x, y);
      if (a < 0) continue;
      // Forward neighbors only; each unordered pair is still seen once.
      static constexpr int kDx[] = {1, -1, 0, 1};
      static constexpr int kDy[] = {0, 1, 1, 1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (!labels.in_bounds(nx, ny)) continue;
        const int b = labels.at(nx, ny);
        if (b >= 0 && b != a) edges.insert({std::min(a, b), std::max(a, b)});
      }
    }
  return {edges.begin(), edges.end()};
}

namespace {

bool block_connected(const std::vector<int>& block, const std::vector<std::vector<bool>>& adj) {
  if (block.size() <= 1) return true;
  std::vector<int> stack{block[0]};
  std::set<int> seen{block[0]};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : block)
      if (!seen.count(w) && adj[v][w]) {
        seen.insert(w);
        stack.push_back(w);
      }
  }
  return seen.size() == block.size();
}

// Restricted growth strings: assignment[i] <= 1 + max(assignment[0..i-1]).
// Enumerated in lexicographic order, pruning blocks that exceed the size cap.
void enumerate_rgs(int n, int max_block, std::vector<int>& assignment, std::vector<int>& sizes,
                   int used, std::vector<std::vector<int>>& out) {
  const int i = static_cast<int>(assignment.size());
  if (i == n) {
    out.push_back(assignment);
    return;
  }
  for (int g = 0; g <= used; ++g) {
    if (g < used && sizes[g] >= max_block) continue;
    assignment.push_back(g);
    if (g == used)
      sizes.push_back(1);
    else
      ++sizes[g];
    enumerate_rgs(n, max_block, assignment, sizes, std::max(used, g + 1), out);
    assignment.pop_back();
    if (g == used)
      sizes.pop_back();
    else
      --sizes[g];
  }
}

StateSpace merge_blocks(const StateSpace& base, const std::vector<std::vector<int>>& blocks) {
  StateSpace ss;
  ss.resolution = base.resolution;
  ss.labels = LabelGrid(base.labels.width(), base.labels.height(), -1);
  ss.object_location.resize(base.object_location.size(), -1);
  for (const auto& block : blocks) {
    Location loc;
    loc.merged_from = block;
    for (int region : block) {
      const Location& part = base.locations[region];
      loc.objects.insert(loc.objects.end(), part.objects.begin(), part.objects.end());
      loc.cells.insert(loc.cells.end(), part.cells.begin(), part.cells.end());
    }
    std::sort(loc.objects.begin(), loc.objects.end());
    const int index = static_cast<int>(ss.locations.size());
    for (int obj : loc.objects) ss.object_location[obj] = index;
    for (const Cell& c : loc.cells) ss.labels.at(c) = index;
    ss.locations.push_back(std::move(loc));
  }
  return ss;
}

std::vector<std::vector<int>> blocks_of(const std::vector<int>& rgs) {
  const int groups = *std::max_element(rgs.begin(), rgs.end()) + 1;
  std::vector<std::vector<int>> blocks(groups);
  for (size_t i = 0; i < rgs.size(); ++i) blocks[rgs[i]].push_back(static_cast<int>(i));
  // RGS groups are already ordered by their smallest member.
  return blocks;
}

}  // namespace

std::vector<StateSpace> enumerate_candidates(const StateSpace& base,
                                             const std::vector<std::pair<int, int>>& edges,
                                             const CandidateLimits& limits) {
  const int n = static_cast<int>(base.locations.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) adj[a][b] = adj[b][a] = true;

  std::vector<std::vector<std::vector<int>>> groupings;
  if (limits.single_merge_only) {
    // Base plus one candidate per adjacency edge, merging just that pair.
    std::vector<std::vector<int>> singletons;
    for (int i = 0; i < n; ++i) singletons.push_back({i});
    groupings.push_back(singletons);
    for (const auto& [a, b] : edges) {
      std::vector<std::vector<int>> blocks;
      for (int i = 0; i < n; ++i) {
        if (i == b) continue;
        if (i == a)
          blocks.push_back({a, b});
        else
          blocks.push_back({i});
      }
      groupings.push_back(blocks);
    }
  } else {
    std::vector<std::vector<int>> all_rgs;
    std::vector<int> assignment, sizes;
    enumerate_rgs(n, std::max(1, limits.max_group_size), assignment, sizes, 0, all_rgs);
    for (const auto& rgs : all_rgs) {
      auto blocks = blocks_of(rgs);
      bool ok = true;
      for (const auto& block : blocks)
        if (!block_connected(block, adj)) ok = false;
      if (ok) groupings.push_back(std::move(blocks));
    }
    // Base (all singletons, the unique n-block grouping) first, then fewer
    // merges before deeper ones; equal block counts keep enumeration order.
    std::stable_sort(groupings.begin(), groupings.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }

  if (static_cast<int>(groupings.size()) > limits.max_candidates)
    groupings.resize(limits.max_candidates);

  std::vector<StateSpace> candidates;
  candidates.reserve(groupings.size());
  for (const auto& blocks : groupings) {
    StateSpace ss = merge_blocks(base, blocks);
    ss.id = static_cast<int>(candidates.size());
    candidates.push_back(std::move(ss));
  }
  return candidates;
}

double score_state_space(const StateSpace& ss, const std::vector<FeasibilityField>& fields,
                         const FeasibilityParams& params, std::uint64_t seed) {
  double total = 0.0;
  for (size_t loc = 0; loc < ss.locations.size(); ++loc) {
    const Location& location = ss.locations[loc];
    std::uint64_t group_bits = 0;
    for (int region : location.merged_from) group_bits |= std::uint64_t{1} << (region % 64);
    for (int obj : location.objects) {
      // Seeded by (group, object): a location shared between candidates
      // contributes the same sampled estimate to each of their scores.
      Rng rng(derive_seed(derive_seed(seed, group_bits), static_cast<std::uint64_t>(obj)));
      total += task_feasibility(fields[obj], ss, static_cast<int>(loc), params, rng);
    }
  }
  return total;
}

CandidateSet rank_and_select(const std::vector<StateSpace>& candidates,
                             const std::vector<double>& scores, int k) {
  if (candidates.empty()) throw EmptySupport("rank_and_select on empty candidate list");
  if (candidates.size() != scores.size())
    throw std::invalid_argument("rank_and_select: scores do not align with candidates");

  std::vector<int> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });

  CandidateSet set;
  set.top_k = k;
  const int kept = std::min<int>(k, static_cast<int>(order.size()));
  double total = 0.0;
  for (int i = 0; i < kept; ++i) {
    set.candidates.push_back(candidates[order[i]]);
    set.scores.push_back(scores[order[i]]);
    total += scores[order[i]];
  }
  for (int i = 0; i < kept; ++i)
    set.selection_weights.push_back(total > 0.0 ? set.scores[i] / total : 1.0 / kept);
  return set;
}

void write_ppm(const StateSpace& ss, const std::string& path) {
  static constexpr unsigned char kPalette[][3] = {
      {230, 97, 90},  {86, 180, 233},  {240, 195, 65}, {120, 200, 120},
      {170, 120, 220}, {250, 150, 80}, {100, 180, 180}, {220, 120, 180},
      {140, 140, 90}, {90, 120, 220},  {200, 200, 120}, {160, 220, 200},
  };
  constexpr int kPaletteSize = static_cast<int>(sizeof(kPalette) / sizeof(kPalette[0]));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image file: " + path);
  out << "P6\n" << ss.labels.width() << " " << ss.labels.height() << "\n255\n";
  for (int y = 0; y < ss.labels.height(); ++y)
    for (int x = 0; x < ss.labels.width(); ++x) {
      const int label = ss.labels.at(x, y);
      if (label < 0) {
        out.put(static_cast<char>(245));
        out.put(static_cast<char>(245));
        out.put(static_cast<char>(245));
      } else {
        const auto& rgb = kPalette[label % kPaletteSize];
        out.put(static_cast<char>(rgb[0]));
        out.put(static_cast<char>(rgb[1]));
        out.put(static_cast<char>(rgb[2]));
      }
    }
}

std::string candidate_report(const std::vector<StateSpace>& candidates,
                             const std::vector<double>& scores) {
  std::ostringstream out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    out << "candidate " << candidates[i].id << ": score ";
    out.setf(std::ios::fixed);
    out.precision(6);
    out << (i < scores.size() ? scores[i] : 0.0);
    out.unsetf(std::ios::fixed);
    out << " groups";
    for (const auto& loc : candidates[i].locations) {
      out << " {";
      for (size_t j = 0; j < loc.merged_from.size(); ++j) {
        if (j) out << ",";
        out << loc.merged_from[j];
      }
      out << "}";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace s3o
