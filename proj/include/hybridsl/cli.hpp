#pragma once

#include "hybridsl/benchmarks.hpp"
#include "hybridsl/solvers.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hybridsl {

/// Everything a `run` or `compare` invocation needs. Unset optionals keep the
/// benchmark's defaults.
struct RunConfig {
  std::string benchmark = "weak_strong";
  Method method = Method::vi;
  std::vector<Method> methods;      // compare
  std::vector<double> epsilons{1e-6};
  std::optional<StoppingNorm> norm;
  std::optional<int> inner_sweeps;
  std::optional<int> warmup_vi;
  std::optional<double> dt;
  std::optional<std::vector<std::size_t>> nodes;
  std::optional<std::vector<Interval>> bounds;
  std::optional<int> control_samples;
  std::optional<Point> x0;
  std::optional<int> q0;
  std::optional<double> horizon;
  std::string out_dir = "out";
  int threads = 0;                  // 0: all cores
  int max_iterations = 100000;
};

/// Settings keyed by flag name without dashes: benchmark, solver, eps, norm, nit,
/// warmup, dt, nodes, bounds, nu, x0, q0, tf, out, threads, max-iters, methods.
/// Throws std::invalid_argument on unknown keys and malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Benchmark spec with the grid, step and trajectory overrides of `config` applied.
BenchmarkSpec resolve_benchmark(const RunConfig& config);

SolverConfig solver_config(const BenchmarkSpec& spec, const RunConfig& config, Method method, double eps);

enum ExitCode { exit_ok = 0, exit_not_converged = 1, exit_usage = 2, exit_failure = 3 };

/// Solves, synthesizes a trajectory and writes value.csv, policy.csv,
/// trajectory.csv, switches.csv, convergence.csv and summary.json.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Runs every method at every epsilon and writes comparison.csv and
/// cross_difference.csv.
int compare(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace hybridsl
