#include "hybridsl/hybrid_model.hpp"

#include "hybridsl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hybridsl {

std::vector<double> ControlSet::sample(int resolution) const {
  if (resolution < 1) throw std::invalid_argument("control sampling resolution must be >= 1");
  if (is_singleton() || resolution == 1) return {is_singleton() ? lo : 0.5 * (lo + hi)};
  std::vector<double> out(static_cast<std::size_t>(resolution));
  const double step = (hi - lo) / static_cast<double>(resolution - 1);
  for (int k = 0; k < resolution; ++k) out[static_cast<std::size_t>(k)] = lo + step * k;
  out.back() = hi;
  return out;
}

std::function<std::vector<HybridState>(const Point&, int)> switch_to_other_modes(int modes) {
  return [modes](const Point& x, int q) {
    std::vector<HybridState> out;
    out.reserve(static_cast<std::size_t>(modes));
    for (int l = 1; l <= modes; ++l)
      if (l != q) out.push_back({x, l});
    return out;
  };
}

std::function<double(const Point&, int, const Point&, int)>
constant_switch_costs(std::vector<std::vector<double>> cost_matrix) {
  return [costs = std::move(cost_matrix)](const Point&, int q, const Point&, int l) {
    return costs.at(static_cast<std::size_t>(q - 1)).at(static_cast<std::size_t>(l - 1));
  };
}

namespace {

std::string where(const Point& x, int q) {
  std::ostringstream os;
  os << "(x=";
  for (int a = 0; a < x.dim; ++a) os << (a ? "," : "") << x[a];
  os << ", q=" << q << ")";
  return os.str();
}

}  // namespace

std::vector<Diagnostic> validate_problem(const HybridProblem& p, const Grid& grid) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) { out.push_back({Diagnostic::Severity::error, std::move(msg)}); };
  auto warn = [&](std::string msg) { out.push_back({Diagnostic::Severity::warning, std::move(msg)}); };

  if (!(p.discount > 0.0)) error("discount must be positive");
  if (p.dim != grid.dim()) error("problem dimension does not match the grid");
  if (p.modes != grid.modes()) error("problem mode count does not match the grid");
  if (!p.dynamics || !p.running_cost) error("dynamics and running cost are required");
  if (p.controls.lo > p.controls.hi) error("control interval is empty");
  if (p.boundary_penalty && *p.boundary_penalty < 0.0) error("boundary penalty must be nonnegative");
  if (has_errors(out)) return out;

  bool negative_cost = false;
  bool zero_cycle = false;
  bool escaped = false;
  bool overlap = false;
  bool missing_jump = false;
  std::string first_escape;
  std::string first_overlap;
  std::string first_cycle;

  const auto m = static_cast<std::size_t>(p.modes);
  // free_jump[q][l]: a zero-cost jump q -> l exists at the current node (x unchanged).
  std::vector<std::vector<char>> free_jump(m, std::vector<char>(m));
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const Point x = grid.node(i);
    for (auto& row : free_jump) std::fill(row.begin(), row.end(), 0);
    for (int q = 1; q <= p.modes; ++q) {
      const bool in_a = p.in_autonomous_set(x, q);
      const bool in_c = p.in_controlled_set(x, q);
      if (in_a && in_c && !overlap) {
        overlap = true;
        first_overlap = where(x, q);
      }
      auto note = [&](const HybridState& y, double c) {
        if (c < 0.0) negative_cost = true;
        if (c == 0.0 && y.mode != q && y.x == x)
          free_jump[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(y.mode - 1)] = 1;
      };
      if (in_a) {
        if (p.jump_controls.empty() || !p.transition) missing_jump = true;
        for (int w = 0; w < static_cast<int>(p.jump_controls.size()) && p.transition; ++w) {
          const HybridState y = p.transition(x, q, w);
          if (!grid.contains(y.x) || y.mode < 1 || y.mode > p.modes) {
            if (!escaped) first_escape = where(x, q);
            escaped = true;
            continue;
          }
          note(y, p.autonomous_cost ? p.autonomous_cost(x, q, w) : 0.0);
        }
      }
      if (in_c) {
        const auto dests = p.destinations ? p.destinations(x, q) : std::vector<HybridState>{};
        if (dests.empty()) missing_jump = true;
        for (const auto& y : dests) {
          if (!grid.contains(y.x) || y.mode < 1 || y.mode > p.modes) {
            if (!escaped) first_escape = where(x, q);
            escaped = true;
            continue;
          }
          if (y.mode != q) note(y, p.controlled_cost ? p.controlled_cost(x, q, y.x, y.mode) : 0.0);
        }
      }
    }
    if (zero_cycle) continue;
    // Transitive closure; a mode that reaches itself closes a zero-cost cycle.
    auto reach = free_jump;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = 1;
    for (std::size_t a = 0; a < m && !zero_cycle; ++a)
      if (reach[a][a]) {
        zero_cycle = true;
        first_cycle = where(x, static_cast<int>(a + 1));
      }
  }
  if (negative_cost) error("negative switching cost");
  if (escaped) error("jump destination leaves the computational domain at " + first_escape);
  if (overlap) error("autonomous and controlled jump sets intersect at " + first_overlap);
  if (missing_jump) error("jump set node without an admissible jump");
  if (zero_cycle)
    warn("zero switching cost: a cycle of free jumps exists at " + first_cycle +
         ", so Zeno executions are not excluded by the costs");
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
}

}  // namespace hybridsl
