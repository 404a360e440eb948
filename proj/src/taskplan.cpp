#include "s3o/taskplan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "s3o/errors.hpp"

namespace s3o {

namespace {

std::string location_name(int location) {
  return location == SymbolicState::kStart ? std::string("start")
                                           : "l" + std::to_string(location + 1);
}

std::string object_name(int object) { return "o" + std::to_string(object + 1); }

}  // namespace

SymbolicState initial_state(const StateSpace& ss) {
  SymbolicState state;
  state.robot_at = SymbolicState::kStart;
  state.object_at = ss.object_location;
  state.collected.assign(ss.object_location.size(), false);
  return state;
}

SymbolicState apply(const SymbolicState& state, const TaskAction& a) {
  SymbolicState next = state;
  if (a.kind == TaskAction::Kind::Goto) {
    if (state.robot_at != a.from)
      throw PreconditionViolation("at(robot, " + location_name(a.from) + ")");
    next.robot_at = a.to;
    return next;
  }
  if (state.robot_at != a.location)
    throw PreconditionViolation("at(robot, " + location_name(a.location) + ")");
  if (a.object < 0 || a.object >= static_cast<int>(state.object_at.size()))
    throw PreconditionViolation("exists(" + object_name(a.object) + ")");
  if (state.collected[a.object] || state.object_at[a.object] != a.location)
    throw PreconditionViolation("at(" + object_name(a.object) + ", " +
                                location_name(a.location) + ")");
  next.collected[a.object] = true;
  next.object_at[a.object] = -1;
  return next;
}

SymbolicState apply_sequence(const SymbolicState& state, const TaskSequence& seq) {
  SymbolicState current = state;
  for (const TaskAction& a : seq.actions) current = apply(current, a);
  return current;
}

namespace {

Pose2D location_centroid(const Location& loc, double resolution) {
  if (loc.cells.empty()) return {0.0, 0.0};
  double sx = 0.0, sy = 0.0;
  for (const Cell& c : loc.cells) {
    sx += (c.x + 0.5) * resolution;
    sy += (c.y + 0.5) * resolution;
  }
  return {sx / loc.cells.size(), sy / loc.cells.size()};
}

double tour_length(const std::vector<int>& visits, const std::vector<Pose2D>& centroids,
                   const Pose2D& start) {
  double total = 0.0;
  Pose2D at = start;
  for (int loc : visits) {
    total += distance(at, centroids[loc]);
    at = centroids[loc];
  }
  return total;
}

}  // namespace

std::vector<TaskSequence> enumerate_sequences(const StateSpace& ss, const SymbolicState& init,
                                              const Pose2D& robot_start, int limit) {
  std::vector<int> visits;
  for (size_t loc = 0; loc < ss.locations.size(); ++loc) {
    bool occupied = false;
    for (int obj : ss.locations[loc].objects)
      if (!init.collected[obj]) occupied = true;
    if (occupied) visits.push_back(static_cast<int>(loc));
  }
  if (visits.empty()) return {};

  std::vector<Pose2D> centroids;
  centroids.reserve(ss.locations.size());
  for (const Location& loc : ss.locations)
    centroids.push_back(location_centroid(loc, ss.resolution));

  // visits starts sorted, so next_permutation walks lexicographic order.
  std::vector<std::vector<int>> orders;
  std::vector<int> perm = visits;
  do {
    orders.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::stable_sort(orders.begin(), orders.end(), [&](const auto& a, const auto& b) {
    return tour_length(a, centroids, robot_start) < tour_length(b, centroids, robot_start);
  });
  if (static_cast<int>(orders.size()) > limit) orders.resize(limit);

  std::vector<TaskSequence> sequences;
  sequences.reserve(orders.size());
  for (const auto& order : orders) {
    TaskSequence seq;
    seq.state_space_id = ss.id;
    int at = init.robot_at;
    for (int loc : order) {
      seq.actions.push_back(TaskAction::make_goto(at, loc));
      at = loc;
      for (int obj : ss.locations[loc].objects)
        if (!init.collected[obj]) seq.actions.push_back(TaskAction::make_pickup(obj, loc));
    }
    apply_sequence(init, seq);  // every emitted sequence must validate
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

std::string render_sequence(const TaskSequence& seq) {
  std::ostringstream out;
  for (size_t i = 0; i < seq.actions.size(); ++i) {
    if (i) out << "; ";
    const TaskAction& a = seq.actions[i];
    if (a.kind == TaskAction::Kind::Goto)
      out << "goto(" << location_name(a.to) << ")";
    else
      out << "pickup(" << object_name(a.object) << ")";
  }
  return out.str();
}

}  // namespace s3o
