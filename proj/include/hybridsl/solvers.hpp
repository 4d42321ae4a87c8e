#pragma once

#include "hybridsl/assembly.hpp"
#include "hybridsl/bellman.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hybridsl {

enum class Method { vi, pi, mpi };
enum class StoppingNorm { sup_update, relative_l1_update };

const char* to_string(Method m);
const char* to_string(StoppingNorm n);
Method parse_method(const std::string& s);
StoppingNorm parse_norm(const std::string& s);

/// Observer hook: called after every sweep (or policy evaluation) with the new field.
struct IterationEvent {
  int iteration = 0;
  bool improvement = false;  // the sweep re-minimized the policy
  double update = 0.0;
  const ValueField* field = nullptr;
};

struct SolverConfig {
  Method method = Method::vi;
  double tolerance = 1e-6;
  StoppingNorm stopping_norm = StoppingNorm::sup_update;
  int max_iterations = 100000;
  int inner_sweeps = 10;  // N_it
  int warmup_vi = 10;
  std::optional<ValueField> initial_field;
  /// Residual bound of each policy evaluation; tolerance/100 when unset.
  std::optional<double> linear_solver_tolerance;
  std::function<void(const IterationEvent&)> observer;
};

struct ConvergenceReport {
  Method method = Method::vi;
  double tolerance = 0.0;
  int iterations = 0;
  int policy_improvements = 0;
  std::vector<double> update_history;
  double final_residual = 0.0;
  double wall_time = 0.0;
  bool converged = false;
  /// True when policy iteration stopped because the improved policy repeated.
  bool policy_stable = false;
};

struct SolveResult {
  ValueField field;
  ConvergenceReport report;
};

/// Update norm between successive iterates under the chosen criterion.
double update_norm(StoppingNorm norm, const ValueField& next, const ValueField& prev);

/// Constant-per-mode field that one Bellman sweep cannot increase:
/// K = dt*max(l,0)/(1 - e^{-lambda dt}) + max jump cost (+ penalty share), plus the
/// accumulated cost of forced autonomous jump chains out of each mode.
ValueField default_initial_field(const BellmanOperator& op);

SolveResult value_iteration(const BellmanOperator& op, const SolverConfig& config);
SolveResult policy_iteration(const BellmanOperator& op, const SolverConfig& config);
SolveResult modified_policy_iteration(const BellmanOperator& op, const SolverConfig& config);
SolveResult solve(const BellmanOperator& op, const SolverConfig& config);

/// Solution of B w = c with ||B w - c|| <= tol.
ValueField policy_evaluation(const AssembledSystem& system, double tol);

/// True iff T(v) <= v + tol entrywise, i.e. min over policies of (B v - c) <= 0.
bool check_subsolution(const BellmanOperator& op, const ValueField& field, double tol = 1e-12);

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
std::string summary_json(const ConvergenceReport& report, int indent = 2);

}  // namespace hybridsl
