#include "hybridsl/solvers.hpp"

#include "hybridsl/format.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hybridsl {

const char* to_string(Method m) {
  switch (m) {
    case Method::vi: return "vi";
    case Method::pi: return "pi";
    case Method::mpi: return "mpi";
  }
  return "?";
}

const char* to_string(StoppingNorm n) {
  return n == StoppingNorm::sup_update ? "sup" : "rel-l1";
}

Method parse_method(const std::string& s) {
  if (s == "vi" || s == "VI") return Method::vi;
  if (s == "pi" || s == "PI") return Method::pi;
  if (s == "mpi" || s == "MPI") return Method::mpi;
  throw std::invalid_argument("unknown solver '" + s + "' (expected vi, pi or mpi)");
}

StoppingNorm parse_norm(const std::string& s) {
  if (s == "sup" || s == "sup_update") return StoppingNorm::sup_update;
  if (s == "rel-l1" || s == "relative_l1_update") return StoppingNorm::relative_l1_update;
  throw std::invalid_argument("unknown stopping norm '" + s + "' (expected sup or rel-l1)");
}

double update_norm(StoppingNorm norm, const ValueField& next, const ValueField& prev) {
  if (norm == StoppingNorm::sup_update) return sup_distance(next, prev);
  double diff = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    diff += std::abs(next[i] - prev[i]);
    mass += std::abs(next[i]);
  }
  if (mass == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / mass;
}

ValueField default_initial_field(const BellmanOperator& op) {
  const HybridProblem& p = op.problem();
  const Grid& g = op.grid();
  const SchemeParams& s = op.params();
  const double gap = 1.0 - s.discount_factor;
  double k = s.dt * std::max(op.max_running_cost(), 0.0) / gap + op.max_jump_cost();
  if (op.any_clamped_foot()) k += s.discount_factor * p.boundary_penalty.value_or(0.0) / gap;

  // Longest forced-jump cost chain out of each mode; m rounds suffice without cycles.
  std::vector<double> offset(static_cast<std::size_t>(g.modes()), 0.0);
  for (int round = 0; round < g.modes(); ++round) {
    bool changed = false;
    for (int q = 1; q <= g.modes(); ++q) {
      for (std::size_t i = 0; i < g.nodes(); ++i) {
        if (!op.is_autonomous(g.offset(i, q))) continue;
        const Point x = g.node(i);
        for (int w = 0; w < static_cast<int>(p.jump_controls.size()); ++w) {
          const HybridState y = p.transition(x, q, w);
          const double c = p.autonomous_cost ? p.autonomous_cost(x, q, w) : 0.0;
          const double cand = offset[static_cast<std::size_t>(y.mode - 1)] + c;
          auto& cur = offset[static_cast<std::size_t>(q - 1)];
          if (cand > cur) {
            cur = cand;
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }

  ValueField v(g.size());
  for (int q = 1; q <= g.modes(); ++q)
    std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(g.offset(0, q)), g.nodes(),
                k + offset[static_cast<std::size_t>(q - 1)]);
  return v;
}

namespace {

using Clock = std::chrono::steady_clock;

ValueField initial_field(const BellmanOperator& op, const SolverConfig& config) {
  if (config.initial_field) {
    if (config.initial_field->size() != op.size()) throw std::invalid_argument("initial field does not match grid");
    return *config.initial_field;
  }
  return default_initial_field(op);
}

void validate(const SolverConfig& c) {
  if (!(c.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (c.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (c.inner_sweeps < 1) throw std::invalid_argument("inner sweep count must be >= 1");
  if (c.warmup_vi < 0) throw std::invalid_argument("warmup count must be >= 0");
}

void finish(const BellmanOperator& op, SolveResult& r, Clock::time_point start) {
  r.report.final_residual = qvi_residual(op, r.field);
  r.report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
}

// Records one sweep; returns true when the stopping criterion holds.
bool record(SolveResult& r, const SolverConfig& config, ValueField& current, ValueField& next, bool improvement) {
  const double u = update_norm(config.stopping_norm, next, current);
  current.swap(next);
  auto& rep = r.report;
  ++rep.iterations;
  if (improvement) ++rep.policy_improvements;
  rep.update_history.push_back(u);
  if (config.observer) config.observer({rep.iterations, improvement, u, &current});
  if (u < config.tolerance) rep.converged = true;
  return rep.converged;
}

}  // namespace

SolveResult value_iteration(const BellmanOperator& op, const SolverConfig& config) {
  validate(config);
  const auto start = Clock::now();
  SolveResult r;
  r.report.method = Method::vi;
  r.report.tolerance = config.tolerance;
  ValueField v = initial_field(op, config);
  ValueField next;
  while (r.report.iterations < config.max_iterations) {
    op.apply(v, next, nullptr);
    if (record(r, config, v, next, false)) break;
  }
  r.field = std::move(v);
  finish(op, r, start);
  return r;
}

ValueField policy_evaluation(const AssembledSystem& system, double tol) { return solve(system.B, system.c, tol); }

SolveResult policy_iteration(const BellmanOperator& op, const SolverConfig& config) {
  validate(config);
  if (op.grid().dim() != 1) throw std::invalid_argument("exact policy iteration uses the 1D matrix form");
  const auto start = Clock::now();
  const double lin_tol = config.linear_solver_tolerance.value_or(config.tolerance / 100.0);
  SolveResult r;
  r.report.method = Method::pi;
  r.report.tolerance = config.tolerance;
  ValueField v = initial_field(op, config);
  Policy policy = greedy_policy(op, v);
  while (r.report.iterations < config.max_iterations) {
    check_switch_cycles(op.grid(), policy);
    const AssembledSystem sys = assemble_B(op.problem(), op.grid(), op.params(), policy);
    ValueField w = policy_evaluation(sys, lin_tol);
    if (record(r, config, v, w, true)) break;
    Policy improved = greedy_policy(op, v);
    if (improved == policy) {
      // Re-evaluating an unchanged policy reproduces v, so the next update is zero.
      ValueField same = v;
      r.report.policy_stable = true;
      record(r, config, v, same, true);
      break;
    }
    policy = std::move(improved);
  }
  r.field = std::move(v);
  finish(op, r, start);
  return r;
}

SolveResult modified_policy_iteration(const BellmanOperator& op, const SolverConfig& config) {
  validate(config);
  const auto start = Clock::now();
  SolveResult r;
  r.report.method = Method::mpi;
  r.report.tolerance = config.tolerance;
  ValueField v = initial_field(op, config);
  ValueField next;
  std::vector<NodeDecision> decisions;
  bool done = false;
  for (int w = 0; w < config.warmup_vi && !done && r.report.iterations < config.max_iterations; ++w) {
    op.apply(v, next, &decisions);
    done = record(r, config, v, next, true);
  }
  for (long j = 0; !done && r.report.iterations < config.max_iterations; ++j) {
    const bool improve = j % config.inner_sweeps == 0;
    if (improve)
      op.apply(v, next, &decisions);
    else
      op.apply_frozen(decisions, v, next);
    done = record(r, config, v, next, improve);
  }
  r.field = std::move(v);
  finish(op, r, start);
  return r;
}

SolveResult solve(const BellmanOperator& op, const SolverConfig& config) {
  switch (config.method) {
    case Method::vi: return value_iteration(op, config);
    case Method::pi: return policy_iteration(op, config);
    case Method::mpi: return modified_policy_iteration(op, config);
  }
  throw std::invalid_argument("unknown method");
}

bool check_subsolution(const BellmanOperator& op, const ValueField& field, double tol) {
  ValueField next;
  op.apply(field, next, nullptr);
  for (std::size_t i = 0; i < next.size(); ++i)
    if (next[i] > field[i] + tol) return false;
  return true;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "iteration,update_norm\n";
  for (std::size_t j = 0; j < report.update_history.size(); ++j)
    out << j + 1 << ',' << fmt_double(report.update_history[j]) << '\n';
}

std::string summary_json(const ConvergenceReport& report, int indent) {
  nlohmann::ordered_json j;
  j["method"] = to_string(report.method);
  j["epsilon"] = report.tolerance;
  j["iterations"] = report.iterations;
  j["improvements"] = report.policy_improvements;
  j["final_residual"] = report.final_residual;
  j["wall_time"] = report.wall_time;
  j["converged"] = report.converged;
  return j.dump(indent);
}

}  // namespace hybridsl
