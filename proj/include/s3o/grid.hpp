#pragma once

#include <cassert>
#include <vector>

#include "s3o/geometry.hpp"

namespace s3o {

// Row-major 2D array. Index 0 is the cell at the world origin corner.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
  bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }

  int index(int x, int y) const {
    assert(in_bounds(x, y));
    return y * width_ + x;
  }
  int index(Cell c) const { return index(c.x, c.y); }
  Cell cell_of(int idx) const { return {idx % width_, idx / width_}; }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& at(Cell c) { return data_[index(c)]; }
  const T& at(Cell c) const { return data_[index(c)]; }
  T& operator[](int idx) { return data_[idx]; }
  const T& operator[](int idx) const { return data_[idx]; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using OccupancyGrid = Grid<unsigned char>;  // nonzero = blocked
using LabelGrid = Grid<int>;                // location id, -1 = unlabeled

}  // namespace s3o
