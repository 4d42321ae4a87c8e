#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridsl {

/// Largest continuous state dimension handled by the grids and the interpolation.
inline constexpr int kMaxDim = 2;

/// A point of the continuous state space R^d, d <= kMaxDim.
struct Point {
  std::array<double, kMaxDim> coords{};
  int dim = 1;

  Point() = default;
  explicit Point(double x) : coords{x, 0.0}, dim(1) {}
  Point(double x, double y) : coords{x, y}, dim(2) {}

  double operator[](int axis) const { return coords[static_cast<std::size_t>(axis)]; }
  double& operator[](int axis) { return coords[static_cast<std::size_t>(axis)]; }

  bool operator==(const Point& other) const = default;
};

/// A hybrid state (x, q). Modes are labelled 1..m.
struct HybridState {
  Point x;
  int mode = 1;
};

/// Compact interval of admissible continuous controls. lo == hi describes a singleton.
struct ControlSet {
  double lo = 0.0;
  double hi = 0.0;

  bool is_singleton() const { return lo == hi; }
  /// Uniform samples lo, ..., hi in increasing order; a singleton yields one sample.
  std::vector<double> sample(int resolution) const;
  bool contains(double a, double tol = 1e-12) const { return a >= lo - tol && a <= hi + tol; }
};

/// Complete description of an infinite-horizon hybrid optimal control problem.
///
/// All closures must be pure. Modes passed to them are 1-based, and the
/// index w of an autonomous jump control refers to `jump_controls`.
struct HybridProblem {
  std::string name;
  int dim = 1;
  int modes = 1;

  std::function<Point(const Point&, int, double)> dynamics;
  std::function<double(const Point&, int, double)> running_cost;
  double discount = 1.0;
  ControlSet controls;

  std::vector<std::string> jump_controls;
  std::function<bool(const Point&, int)> autonomous_set;
  std::function<bool(const Point&, int)> controlled_set;
  /// Candidate destinations (x', q') of a controlled jump from (x, q).
  std::function<std::vector<HybridState>(const Point&, int)> destinations;
  std::function<HybridState(const Point&, int, int)> transition;
  std::function<double(const Point&, int, int)> autonomous_cost;
  std::function<double(const Point&, int, const Point&, int)> controlled_cost;

  /// Cost added to the value picked up at a characteristic foot that left the domain.
  std::optional<double> boundary_penalty;

  bool in_autonomous_set(const Point& x, int q) const { return autonomous_set && autonomous_set(x, q); }
  bool in_controlled_set(const Point& x, int q) const { return controlled_set && controlled_set(x, q); }
};

/// Builders for the common "same x, other mode" jump structure.
std::function<std::vector<HybridState>(const Point&, int)> switch_to_other_modes(int modes);
std::function<double(const Point&, int, const Point&, int)>
constant_switch_costs(std::vector<std::vector<double>> cost_matrix);

class Grid;

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity = Severity::error;
  std::string message;
};

/// Spot-checks the decidable assumptions on the grid nodes. Errors mean the
/// problem is ill-posed for the scheme; warnings flag allowed but unusual data.
std::vector<Diagnostic> validate_problem(const HybridProblem& problem, const Grid& grid);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace hybridsl
