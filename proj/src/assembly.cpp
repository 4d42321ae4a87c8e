#include "hybridsl/assembly.hpp"

#include "hybridsl/format.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hybridsl {

namespace {

// Courant numbers may exceed 1 by rounding noise when dx = dt*||f||.
constexpr double kCourantSlack = 1e-9;

void check_policy_shape(const Grid& grid, const Policy& policy) {
  if (policy.control.size() != grid.size() || policy.mode.size() != grid.size())
    throw InvalidPolicyError("policy size does not match the grid");
  for (int s : policy.mode)
    if (s < 1 || s > grid.modes()) throw InvalidPolicyError("policy mode label out of range");
}

bool same_point(const Point& a, const Point& b) {
  for (int k = 0; k < a.dim; ++k)
    if (std::abs(a[k] - b[k]) > 1e-12 * (1.0 + std::abs(a[k]))) return false;
  return true;
}

// Cheapest autonomous jump from (x, k) that lands on (x, target); infinity if none does.
double autonomous_switch_cost(const HybridProblem& p, const Point& x, int k, int target) {
  double best = std::numeric_limits<double>::infinity();
  for (int w = 0; w < static_cast<int>(p.jump_controls.size()); ++w) {
    const HybridState y = p.transition(x, k, w);
    if (y.mode == target && same_point(y.x, x))
      best = std::min(best, p.autonomous_cost ? p.autonomous_cost(x, k, w) : 0.0);
  }
  return best;
}

bool controlled_destination_exists(const HybridProblem& p, const Point& x, int k, int target) {
  if (!p.destinations) return false;
  for (const auto& y : p.destinations(x, k))
    if (y.mode == target && same_point(y.x, x)) return true;
  return false;
}

std::string node_name(std::size_t flat) { return "flat index " + std::to_string(flat + 1); }

}  // namespace

std::pair<SparseMatrix, SparseMatrix> assemble_D(const HybridProblem& p, const Grid& grid, const Policy& policy) {
  check_policy_shape(grid, policy);
  std::vector<Triplet> da;
  std::vector<Triplet> dc;
  for (int k = 1; k <= grid.modes(); ++k) {
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const std::size_t row = grid.offset(i, k);
      const int s = policy.mode[row];
      if (s == k) continue;
      const Point x = grid.node(i);
      const std::size_t col = grid.offset(i, s);
      if (p.in_autonomous_set(x, k)) {
        if (!std::isfinite(autonomous_switch_cost(p, x, k, s)))
          throw InvalidPolicyError("switch at " + node_name(row) + " is not in the image of the transition map");
        da.push_back({row, col, 1.0});
      } else if (p.in_controlled_set(x, k)) {
        if (!controlled_destination_exists(p, x, k, s))
          throw InvalidPolicyError("switch at " + node_name(row) + " is not an admissible destination");
        dc.push_back({row, col, 1.0});
      } else {
        throw InvalidPolicyError("switch at " + node_name(row) + " outside the jump sets");
      }
    }
  }
  return {SparseMatrix(grid.size(), grid.size(), std::move(da)), SparseMatrix(grid.size(), grid.size(), std::move(dc))};
}

SparseMatrix assemble_E(const HybridProblem& p, const Grid& grid, const SchemeParams& params, const Policy& policy) {
  check_policy_shape(grid, policy);
  if (grid.dim() != 1) throw std::invalid_argument("matrix assembly is implemented for d = 1 only");
  const double dx = grid.spacing(0);
  std::vector<Triplet> e;
  e.reserve(2 * grid.size());
  for (int k = 1; k <= grid.modes(); ++k) {
    const std::size_t base = grid.offset(0, k);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const std::size_t row = base + i;
      if (policy.mode[row] != k) continue;
      const Point x = grid.node(i);
      const double f = p.dynamics(x, k, policy.control[row])[0];
      const double h = params.dt / dx * f;
      if (!(std::abs(h) <= 1.0 + kCourantSlack))
        throw CourantError("Courant number " + fmt_double(h) + " at " + node_name(row) +
                               " exceeds 1; reduce the time step",
                           row + 1, h);
      Point foot = x;
      foot[0] = x[0] + params.dt * f;
      const Stencil s = grid.stencil(grid.clamp(foot).first);
      for (int j = 0; j < s.count; ++j)
        e.push_back({row, base + s.node[static_cast<std::size_t>(j)], s.weight[static_cast<std::size_t>(j)]});
    }
  }
  return {grid.size(), grid.size(), std::move(e)};
}

std::vector<double> assemble_c(const HybridProblem& p, const Grid& grid, const SchemeParams& params,
                               const Policy& policy) {
  check_policy_shape(grid, policy);
  const double penalty = p.boundary_penalty.value_or(0.0);
  std::vector<double> c(grid.size());
  for (int k = 1; k <= grid.modes(); ++k) {
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const std::size_t row = grid.offset(i, k);
      const int s = policy.mode[row];
      const Point x = grid.node(i);
      if (s == k) {
        const double a = policy.control[row];
        Point foot = x;
        const Point f = p.dynamics(x, k, a);
        for (int d = 0; d < x.dim; ++d) foot[d] = x[d] + params.dt * f[d];
        const bool clamped = grid.clamp(foot).second;
        c[row] = -(params.dt * p.running_cost(x, k, a)) - params.discount_factor * (clamped ? penalty : 0.0);
      } else if (p.in_autonomous_set(x, k)) {
        const double xi = autonomous_switch_cost(p, x, k, s);
        if (!std::isfinite(xi))
          throw InvalidPolicyError("switch at " + node_name(row) + " is not in the image of the transition map");
        c[row] = -xi;
      } else {
        c[row] = -(p.controlled_cost ? p.controlled_cost(x, k, x, s) : 0.0);
      }
    }
  }
  return c;
}

void check_switch_cycles(const Grid& grid, const Policy& policy) {
  check_policy_shape(grid, policy);
  // A chain of switch rows that returns to its start has no discounted row to anchor it.
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    for (int k = 1; k <= grid.modes(); ++k) {
      int cur = k;
      for (int steps = 0; policy.mode[grid.offset(i, cur)] != cur; ++steps) {
        if (steps >= grid.modes())
          throw InvalidPolicyError("pure switch cycle through " + node_name(grid.offset(i, k)) +
                                   " makes the policy system singular");
        cur = policy.mode[grid.offset(i, cur)];
      }
    }
  }
}

AssembledSystem assemble_B(const HybridProblem& p, const Grid& grid, const SchemeParams& params,
                           const Policy& policy) {
  check_policy_shape(grid, policy);
  auto [da, dc] = assemble_D(p, grid, policy);
  const SparseMatrix e = assemble_E(p, grid, params, policy);
  SparseMatrix b = SparseMatrix::identity(grid.size()).scaled(-1.0) + da + dc + e.scaled(params.discount_factor);
  return {std::move(b), assemble_c(p, grid, params, policy)};
}

Policy policy_from_decisions(const Grid& grid, const std::vector<NodeDecision>& decisions) {
  if (decisions.size() != grid.size()) throw std::invalid_argument("decisions do not match the grid");
  Policy pol;
  pol.control.resize(grid.size());
  pol.mode.resize(grid.size());
  for (std::size_t flat = 0; flat < decisions.size(); ++flat) {
    const NodeDecision& d = decisions[flat];
    const int own = static_cast<int>(flat / grid.nodes()) + 1;
    pol.control[flat] = d.control;
    pol.mode[flat] = d.kind == Branch::continuous ? own : d.destination_mode;
  }
  return pol;
}

Policy greedy_policy(const BellmanOperator& op, const ValueField& field) {
  std::vector<NodeDecision> decisions;
  ValueField scratch;
  op.apply(field, scratch, &decisions);
  return policy_from_decisions(op.grid(), decisions);
}

}  // namespace hybridsl
