#include "hybridsl/cli.hpp"

#include "hybridsl/format.hpp"
#include "hybridsl/parallel.hpp"
#include "hybridsl/synthesis.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hybridsl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("--" + key + ": expected a number, got '" + v + "'");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int i = 0;
  try {
    i = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("--" + key + ": expected an integer, got '" + v + "'");
  return i;
}

int positive(const std::string& key, int v) {
  if (v < 1) throw std::invalid_argument("--" + key + " must be at least 1");
  return v;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "benchmark") {
    c.benchmark = v;
  } else if (key == "solver") {
    c.method = parse_method(v);
  } else if (key == "methods") {
    c.methods.clear();
    for (const auto& m : split(v, ',')) c.methods.push_back(parse_method(m));
  } else if (key == "eps") {
    c.epsilons.clear();
    for (const auto& e : split(v, ',')) {
      const double eps = to_double(key, e);
      if (!(eps > 0.0)) throw std::invalid_argument("--eps must be positive");
      c.epsilons.push_back(eps);
    }
    if (c.epsilons.empty()) throw std::invalid_argument("--eps: no value");
  } else if (key == "norm") {
    c.norm = parse_norm(v);
  } else if (key == "nit") {
    c.inner_sweeps = positive(key, to_int(key, v));
  } else if (key == "warmup") {
    const int w = to_int(key, v);
    if (w < 0) throw std::invalid_argument("--warmup must be nonnegative");
    c.warmup_vi = w;
  } else if (key == "dt") {
    const double dt = to_double(key, v);
    if (!(dt > 0.0)) throw std::invalid_argument("--dt must be positive");
    c.dt = dt;
  } else if (key == "nodes") {
    std::vector<std::size_t> n;
    for (const auto& s : split(v, ',')) n.push_back(static_cast<std::size_t>(positive(key, to_int(key, s))));
    c.nodes = n;
  } else if (key == "bounds") {
    std::vector<Interval> b;
    for (const auto& s : split(v, ',')) {
      const auto ends = split(s, ':');
      if (ends.size() != 2) throw std::invalid_argument("--bounds: expected lo:hi[,lo:hi], got '" + v + "'");
      b.push_back({to_double(key, ends[0]), to_double(key, ends[1])});
    }
    c.bounds = b;
  } else if (key == "nu") {
    c.control_samples = positive(key, to_int(key, v));
  } else if (key == "x0") {
    const auto xs = split(v, ',');
    if (xs.size() == 1)
      c.x0 = Point(to_double(key, xs[0]));
    else if (xs.size() == 2)
      c.x0 = Point(to_double(key, xs[0]), to_double(key, xs[1]));
    else
      throw std::invalid_argument("--x0: expected one or two coordinates");
  } else if (key == "q0") {
    c.q0 = positive(key, to_int(key, v));
  } else if (key == "tf") {
    const double tf = to_double(key, v);
    if (!(tf > 0.0)) throw std::invalid_argument("--tf must be positive");
    c.horizon = tf;
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key == "threads") {
    const int t = to_int(key, v);
    if (t < 0) throw std::invalid_argument("--threads must be nonnegative");
    c.threads = t;
  } else if (key == "max-iters") {
    c.max_iterations = positive(key, to_int(key, v));
  } else {
    throw std::invalid_argument("unknown setting '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::string> settings;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    settings[key] = trim(line.substr(eq + 1));
  }
  return settings;
}

BenchmarkSpec resolve_benchmark(const RunConfig& c) {
  BenchmarkSpec spec = benchmark_by_name(c.benchmark);
  const auto dim = static_cast<std::size_t>(spec.problem.dim);
  if (c.bounds) {
    if (c.bounds->size() != dim) throw std::invalid_argument("--bounds: expected " + std::to_string(dim) + " interval(s)");
    spec.grid.bounds = *c.bounds;
    if (spec.spacing_speed > 0.0 && !c.dt) spec.set_dt(spec.grid.dt);
  }
  if (c.dt) spec.set_dt(*c.dt);
  if (c.nodes) {
    if (c.nodes->size() != dim) throw std::invalid_argument("--nodes: expected " + std::to_string(dim) + " count(s)");
    spec.grid.nodes = *c.nodes;
  }
  if (c.control_samples) spec.grid.control_samples = *c.control_samples;
  if (c.x0) {
    if (c.x0->dim != spec.problem.dim) throw std::invalid_argument("--x0: dimension mismatch");
    spec.trajectory.x0 = *c.x0;
  }
  if (c.q0) {
    if (*c.q0 > spec.problem.modes) throw std::invalid_argument("--q0: mode out of range");
    spec.trajectory.q0 = *c.q0;
  }
  if (c.horizon) spec.trajectory.horizon = *c.horizon;
  return spec;
}

SolverConfig solver_config(const BenchmarkSpec& spec, const RunConfig& c, Method method, double eps) {
  SolverConfig s;
  s.method = method;
  s.tolerance = eps;
  s.stopping_norm = c.norm.value_or(spec.solver.norm);
  s.inner_sweeps = c.inner_sweeps.value_or(spec.solver.inner_sweeps);
  s.warmup_vi = c.warmup_vi.value_or(spec.solver.warmup_vi);
  s.max_iterations = c.max_iterations;
  if (spec.solver.zero_initial_field) s.initial_field = ValueField(spec.make_grid().size(), 0.0);
  return s;
}

namespace {

struct Prepared {
  BenchmarkSpec spec;
  Grid grid;
  SchemeParams params;
};

Prepared prepare(const RunConfig& c, std::ostream& err) {
  BenchmarkSpec spec = resolve_benchmark(c);
  Grid grid = spec.make_grid();
  const auto diagnostics = validate_problem(spec.problem, grid);
  for (const auto& d : diagnostics)
    err << (d.severity == Diagnostic::Severity::error ? "error: " : "warning: ") << d.message << '\n';
  if (has_errors(diagnostics)) throw std::invalid_argument("problem validation failed");
  SchemeParams params = spec.make_params();
  return {std::move(spec), std::move(grid), params};
}

void print_summary(std::ostream& log, const std::string& name, const ConvergenceReport& r) {
  log << name << ' ' << to_string(r.method) << " eps=" << fmt_double(r.tolerance) << ": " << r.iterations
      << " iterations";
  if (r.method != Method::vi) log << " (" << r.policy_improvements << " improvements)";
  log << ", residual " << fmt_double(r.final_residual) << ", " << r.wall_time << " s, "
      << (r.converged ? "converged" : "NOT converged") << '\n';
}

}  // namespace

int run(const RunConfig& c, std::ostream& log, std::ostream& err) {
  Prepared prep = prepare(c, err);
  BellmanOperator op(prep.spec.problem, prep.grid, prep.params);
  op.set_threads(c.threads > 0 ? c.threads : default_threads());

  const SolveResult result = solve(op, solver_config(prep.spec, c, c.method, c.epsilons.front()));
  const SweepResult sweep = bellman_apply(op, result.field);
  const auto& tj = prep.spec.trajectory;
  const Trajectory traj = synthesize(op, result.field, tj.x0, tj.q0, tj.horizon);

  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  auto emit = [&dir](const char* file, auto&& writer) {
    const auto path = dir / file;
    auto out = open_output(path);
    writer(out);
    check_written(out, path);
  };
  emit("value.csv", [&](std::ostream& o) { write_value_csv(o, prep.grid, result.field); });
  emit("policy.csv", [&](std::ostream& o) { write_decisions_csv(o, prep.grid, sweep.decisions); });
  emit("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, traj); });
  emit("switches.csv", [&](std::ostream& o) { write_switches_csv(o, traj); });
  emit("convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, result.report); });
  emit("summary.json", [&](std::ostream& o) {
    auto j = nlohmann::ordered_json::parse(summary_json(result.report));
    j["benchmark"] = prep.spec.name;
    j["stopping_norm"] = to_string(solver_config(prep.spec, c, c.method, c.epsilons.front()).stopping_norm);
    j["nodes"] = prep.spec.grid.nodes;
    j["dt"] = prep.spec.grid.dt;
    j["trajectory_cost"] = traj.accumulated_cost;
    j["switches"] = traj.switch_events.size();
    o << j.dump(2) << '\n';
  });

  print_summary(log, prep.spec.name, result.report);
  if (!result.report.converged) {
    err << "error: no convergence within " << c.max_iterations << " iterations\n";
    return exit_not_converged;
  }
  return exit_ok;
}

int compare(const RunConfig& c, std::ostream& log, std::ostream& err) {
  if (c.methods.size() < 2) throw std::invalid_argument("compare needs at least two methods (--methods vi,pi)");
  Prepared prep = prepare(c, err);
  BellmanOperator op(prep.spec.problem, prep.grid, prep.params);
  op.set_threads(c.threads > 0 ? c.threads : default_threads());

  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  const auto table_path = dir / "comparison.csv";
  const auto cross_path = dir / "cross_difference.csv";
  auto table = open_output(table_path);
  auto cross = open_output(cross_path);
  table << "epsilon,method,iterations,improvements,final_residual,converged,wall_time\n";
  cross << "epsilon,method_a,method_b,sup_difference\n";

  bool all_converged = true;
  for (double eps : c.epsilons) {
    std::vector<ValueField> fields;
    for (Method m : c.methods) {
      const SolveResult r = solve(op, solver_config(prep.spec, c, m, eps));
      print_summary(log, prep.spec.name, r.report);
      all_converged = all_converged && r.report.converged;
      table << fmt_double(eps) << ',' << to_string(m) << ',' << r.report.iterations << ','
            << r.report.policy_improvements << ',' << fmt_double(r.report.final_residual) << ','
            << (r.report.converged ? 1 : 0) << ',' << fmt_double(r.report.wall_time) << '\n';
      fields.push_back(r.field);
    }
    for (std::size_t a = 0; a < fields.size(); ++a)
      for (std::size_t b = a + 1; b < fields.size(); ++b)
        cross << fmt_double(eps) << ',' << to_string(c.methods[a]) << ',' << to_string(c.methods[b]) << ','
              << fmt_double(sup_distance(fields[a], fields[b])) << '\n';
  }
  check_written(table, table_path);
  check_written(cross, cross_path);
  if (!all_converged) {
    err << "error: at least one solve did not converge\n";
    return exit_not_converged;
  }
  return exit_ok;
}

}  // namespace hybridsl
