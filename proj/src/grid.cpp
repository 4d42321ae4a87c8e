#include "hybridsl/grid.hpp"

#include "hybridsl/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hybridsl {

namespace {

// Snaps to a grid line when the fractional coordinate is within rounding noise.
constexpr double kSnap = 1e-10;

}  // namespace

Grid::Grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes_per_axis, int modes)
    : bounds_(std::move(bounds)), counts_(std::move(nodes_per_axis)), modes_(modes) {
  if (bounds_.empty() || bounds_.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("grid dimension must be 1 or 2");
  if (counts_.size() != bounds_.size())
    throw std::invalid_argument("one node count per axis is required");
  if (modes_ < 1) throw std::invalid_argument("grid needs at least one mode");
  nodes_ = 1;
  for (std::size_t a = 0; a < bounds_.size(); ++a) {
    if (counts_[a] < 2) throw std::invalid_argument("at least 2 nodes per axis are required");
    if (!(bounds_[a].hi > bounds_[a].lo)) throw std::invalid_argument("empty axis interval");
    spacing_.push_back((bounds_[a].hi - bounds_[a].lo) / static_cast<double>(counts_[a] - 1));
    nodes_ *= counts_[a];
  }
}

std::array<std::size_t, kMaxDim> Grid::node_indices(std::size_t i) const {
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    idx[a] = i % counts_[a];
    i /= counts_[a];
  }
  return idx;
}

Point Grid::node(std::size_t i) const {
  const auto idx = node_indices(i);
  Point p;
  p.dim = dim();
  for (int a = 0; a < dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    // The last node is pinned to the upper bound so that boundary tests are exact.
    p[a] = idx[ua] + 1 == counts_[ua] ? bounds_[ua].hi
                                      : bounds_[ua].lo + static_cast<double>(idx[ua]) * spacing_[ua];
  }
  return p;
}

bool Grid::contains(const Point& x) const {
  for (int a = 0; a < dim(); ++a) {
    const auto& b = bounds(a);
    if (!(x[a] >= b.lo && x[a] <= b.hi)) return false;
  }
  return true;
}

std::pair<Point, bool> Grid::clamp(const Point& x) const {
  Point y = x;
  y.dim = dim();
  bool moved = false;
  for (int a = 0; a < dim(); ++a) {
    const auto& b = bounds(a);
    const double c = std::clamp(x[a], b.lo, b.hi);
    if (c != x[a]) moved = true;
    y[a] = c;
  }
  return {y, moved};
}

namespace {

// Drops zero weights so that on-node points touch a single node.
Stencil compact(Stencil s) {
  int kept = 0;
  for (int j = 0; j < s.count; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (s.weight[uj] == 0.0) continue;
    const auto uk = static_cast<std::size_t>(kept++);
    s.node[uk] = s.node[uj];
    s.weight[uk] = s.weight[uj];
  }
  s.count = kept;
  return s;
}

}  // namespace

Stencil Grid::stencil(const Point& x) const {
  if (!contains(x)) throw std::out_of_range("interpolation point outside the grid bounds");
  std::array<std::size_t, kMaxDim> cell{};
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    double t = (x[a] - bounds_[ua].lo) / spacing_[ua];
    const double r = std::round(t);
    if (std::abs(t - r) < kSnap) t = r;
    const auto last_cell = static_cast<double>(counts_[ua] - 2);
    const double j = std::clamp(std::floor(t), 0.0, last_cell);
    cell[ua] = static_cast<std::size_t>(j);
    frac[ua] = t - j;
  }
  Stencil s;
  if (dim() == 1) {
    s.node[0] = cell[0];
    s.weight[0] = 1.0 - frac[0];
    s.node[1] = cell[0] + 1;
    s.weight[1] = frac[0];
    s.count = 2;
    return compact(s);
  }
  const std::size_t nx = counts_[0];
  const std::size_t base = cell[1] * nx + cell[0];
  const double fx = frac[0];
  const double fy = frac[1];
  s.node = {base, base + 1, base + nx, base + nx + 1};
  s.weight = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
  s.count = 4;
  return compact(s);
}

double Grid::interpolate(const ValueField& field, const Point& x, int mode) const {
  if (mode < 1 || mode > modes_) throw std::out_of_range("mode index out of range");
  if (field.size() != size()) throw std::invalid_argument("value field does not match grid");
  return stencil(x).apply(field.data(), offset(0, mode));
}

std::size_t flat_index(std::size_t i, int k, std::size_t n, int m) {
  if (i < 1 || i > n) throw std::out_of_range("node index out of range: " + std::to_string(i));
  if (k < 1 || k > m) throw std::out_of_range("mode index out of range: " + std::to_string(k));
  return static_cast<std::size_t>(k - 1) * n + i;
}

std::size_t nodes_for_spacing(Interval bounds, double target_spacing) {
  if (!(target_spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  const double cells = std::floor((bounds.hi - bounds.lo) / target_spacing + 1e-9);
  return std::max<std::size_t>(2, static_cast<std::size_t>(cells) + 1);
}

void write_value_csv(std::ostream& out, const Grid& grid, const ValueField& field) {
  out << "mode";
  for (int a = 0; a < grid.dim(); ++a) out << ",i" << a;
  for (int a = 0; a < grid.dim(); ++a) out << ",x" << a;
  out << ",value\n";
  for (int q = 1; q <= grid.modes(); ++q) {
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const auto idx = grid.node_indices(i);
      const Point p = grid.node(i);
      out << q;
      for (int a = 0; a < grid.dim(); ++a) out << ',' << idx[static_cast<std::size_t>(a)] + 1;
      for (int a = 0; a < grid.dim(); ++a) out << ',' << fmt_double(p[a]);
      out << ',' << fmt_double(field[grid.offset(i, q)]) << '\n';
    }
  }
}

}  // namespace hybridsl
