#pragma once

#include <cmath>

namespace s3o {

struct Pose2D {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Pose2D&) const = default;
};

inline double distance(const Pose2D& a, const Pose2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
};

}  // namespace s3o
