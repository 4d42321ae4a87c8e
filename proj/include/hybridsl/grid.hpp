#pragma once

#include "hybridsl/hybrid_model.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace hybridsl {

/// Flat value vector (v^(1), ..., v^(m)); node i of mode k is stored at (k-1)*n + i
/// (0-based storage: (k-1)*n + i0).
using ValueField = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Interpolation stencil: up to 2^d node offsets with nonnegative weights summing to 1.
struct Stencil {
  std::array<std::size_t, 4> node{};
  std::array<double, 4> weight{};
  int count = 0;

  /// Weighted sum of `values` at `base + node[j]`.
  double apply(const double* values, std::size_t base = 0) const {
    double acc = 0.0;
    for (int j = 0; j < count; ++j) acc += weight[j] * values[base + node[j]];
    return acc;
  }
};

/// Uniform tensor grid shared by all modes.
class Grid {
 public:
  Grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes_per_axis, int modes);

  int dim() const { return static_cast<int>(bounds_.size()); }
  int modes() const { return modes_; }
  /// Nodes per mode (n).
  std::size_t nodes() const { return nodes_; }
  /// Length of a value field (n*m).
  std::size_t size() const { return nodes_ * static_cast<std::size_t>(modes_); }

  const Interval& bounds(int axis) const { return bounds_[static_cast<std::size_t>(axis)]; }
  std::size_t nodes_on_axis(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

  /// Coordinates of node i (0-based, axis 0 runs fastest).
  Point node(std::size_t i) const;
  std::array<std::size_t, kMaxDim> node_indices(std::size_t i) const;
  std::size_t offset(std::size_t node, int mode) const {
    return static_cast<std::size_t>(mode - 1) * nodes_ + node;
  }

  bool contains(const Point& x) const;
  /// Componentwise projection onto the bounds, and whether the point moved.
  std::pair<Point, bool> clamp(const Point& x) const;

  /// P1/Q1 stencil of x relative to the start of a mode block. Throws if x is outside.
  Stencil stencil(const Point& x) const;
  /// Interpolated value of mode q at x. Throws if x is outside the bounds or q is invalid.
  double interpolate(const ValueField& field, const Point& x, int mode) const;

 private:
  std::vector<Interval> bounds_;
  std::vector<std::size_t> counts_;
  std::vector<double> spacing_;
  std::size_t nodes_ = 0;
  int modes_ = 1;
};

/// 1-based flat position (k-1)*n + i of node i in mode k.
std::size_t flat_index(std::size_t i, int k, std::size_t n, int m);

/// Number of nodes on [lo, hi] whose spacing is the smallest one not below `target_spacing`.
std::size_t nodes_for_spacing(Interval bounds, double target_spacing);

/// CSV rows (mode, node indices per axis, coordinates per axis, value) in flat order.
void write_value_csv(std::ostream& out, const Grid& grid, const ValueField& field);

}  // namespace hybridsl
