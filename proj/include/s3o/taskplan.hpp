#pragma once

#include <string>
#include <vector>

#include "s3o/geometry.hpp"
#include "s3o/partition.hpp"

namespace s3o {

// Symbolic facts: where the robot is, where each uncollected object is.
struct SymbolicState {
  static constexpr int kStart = -1;  // robot_at before the first goto

  int robot_at = kStart;
  std::vector<int> object_at;   // location index per object; stale once collected
  std::vector<bool> collected;  // an object is either at a location or collected

  bool all_collected() const {
    for (bool c : collected)
      if (!c) return false;
    return true;
  }
};

// goto(from, to) or pickup(object, location).
struct TaskAction {
  enum class Kind { Goto, Pickup };

  Kind kind = Kind::Goto;
  int from = SymbolicState::kStart;  // goto only
  int to = -1;                       // goto only
  int object = -1;                   // pickup only
  int location = -1;                 // pickup only

  static TaskAction make_goto(int from, int to) {
    TaskAction a;
    a.kind = Kind::Goto;
    a.from = from;
    a.to = to;
    return a;
  }
  static TaskAction make_pickup(int object, int location) {
    TaskAction a;
    a.kind = Kind::Pickup;
    a.object = object;
    a.location = location;
    return a;
  }
};

struct TaskSequence {
  std::vector<TaskAction> actions;
  int state_space_id = 0;
};

// All objects uncollected, robot at the start marker.
SymbolicState initial_state(const StateSpace& ss);

// Applies one action. Throws PreconditionViolation naming the missing fact
// (e.g. "at(robot, l2)") when the action is not applicable.
SymbolicState apply(const SymbolicState& state, const TaskAction& a);

// Replays a whole sequence from `state`; throws on the first violation.
SymbolicState apply_sequence(const SymbolicState& state, const TaskSequence& seq);

// Task-level sequences: permutations of visits to the occupied locations,
// each visit = goto followed by pickups of every object there (by index).
// Ordered by a Euclidean tour lower bound from robot_start through the
// location centroids, ascending; ties keep lexicographic visit order; the
// list is truncated at `limit`.
std::vector<TaskSequence> enumerate_sequences(const StateSpace& ss, const SymbolicState& init,
                                              const Pose2D& robot_start, int limit = 24);

// Human-readable trace: "goto(l3); pickup(o2); pickup(o5); ..." (display
// ids are 1-based).
std::string render_sequence(const TaskSequence& seq);

}  // namespace s3o
