// Acceptance checks against the published iteration counts and the qualitative
// behavior of the benchmarks. One PASS/FAIL line per criterion; exit status 1 if
// any criterion fails. Pass criterion numbers as arguments to run a subset.

#include "hybridsl/assembly.hpp"
#include "hybridsl/benchmarks.hpp"
#include "hybridsl/parallel.hpp"
#include "hybridsl/solvers.hpp"
#include "hybridsl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hybridsl;

namespace {

// Pinned tolerances.
constexpr double kCountBand = 0.25;        // relative band around published iteration counts
constexpr int kImprovementBand = 3;        // absolute band around published PI improvements
constexpr double kParityBand = 0.05;       // MPI vs VI total iterations
constexpr double kAgreementFactor = 10.0;  // fixed-point agreement, multiples of eps
constexpr double kOracleTol = 1e-10;
constexpr double kMonotoneSlack = 1e-8;
constexpr double kConsistencyTol = 1e-12;
constexpr double kContractionSlack = 1e-12;
constexpr double kInverterTransient = 1.0;  // s
constexpr double kEllipseBand = 0.2;
constexpr double kEllipseShare = 0.9;

struct Case {
  BenchmarkSpec spec;
  std::unique_ptr<Grid> grid;
  std::unique_ptr<BellmanOperator> op;
  std::map<std::pair<Method, double>, SolveResult> results;

  explicit Case(BenchmarkSpec s) : spec(std::move(s)) {
    grid = std::make_unique<Grid>(spec.make_grid());
    op = std::make_unique<BellmanOperator>(spec.problem, *grid, spec.make_params());
    op->set_threads(default_threads());
  }

  SolverConfig config(Method m, double eps) const {
    SolverConfig c;
    c.method = m;
    c.tolerance = eps;
    c.stopping_norm = spec.solver.norm;
    c.inner_sweeps = spec.solver.inner_sweeps;
    c.warmup_vi = spec.solver.warmup_vi;
    if (spec.solver.zero_initial_field) c.initial_field = ValueField(grid->size(), 0.0);
    return c;
  }

  const SolveResult& get(Method m, double eps) {
    const auto key = std::make_pair(m, eps);
    auto it = results.find(key);
    if (it == results.end()) it = results.emplace(key, solve(*op, config(m, eps))).first;
    return it->second;
  }
};

std::map<std::string, std::unique_ptr<Case>> cases;

Case& bench(const std::string& name) {
  auto& c = cases[name];
  if (!c) c = std::make_unique<Case>(benchmark_by_name(name));
  return *c;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [x]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

/// Sup-norm difference, relative to sup|a| for the relative-l1 benchmarks.
double field_difference(const Case& c, const ValueField& a, const ValueField& b) {
  const double d = sup_distance(a, b);
  return c.spec.solver.norm == StoppingNorm::relative_l1_update ? d / sup_norm(a) : d;
}

void weak_strong_counts(Outcome& o) {
  Case& ws = bench("weak_strong");
  const double eps[] = {1e-3, 1e-6, 1e-12};
  const int vi[] = {456, 1147, 2786};
  const int pi[] = {8, 10, 12};
  for (int k = 0; k < 3; ++k) {
    const int n = ws.get(Method::vi, eps[k]).report.iterations;
    o.require(within(n, vi[k], kCountBand), "VI(" + num(eps[k]) + ")=" + std::to_string(n) + " vs " + std::to_string(vi[k]));
  }
  for (int k = 0; k < 3; ++k) {
    const int n = ws.get(Method::pi, eps[k]).report.policy_improvements;
    o.require(std::abs(n - pi[k]) <= kImprovementBand,
              "PI(" + num(eps[k]) + ")=" + std::to_string(n) + " vs " + std::to_string(pi[k]));
  }
}

void convergence_shape(Outcome& o) {
  Case& ws = bench("weak_strong");
  const double ratio = static_cast<double>(ws.get(Method::vi, 1e-6).report.iterations) /
                       ws.get(Method::vi, 1e-3).report.iterations;
  o.require(ratio >= 2.0 && ratio <= 3.0, "N_V ratio " + num(ratio));
  const int gap = ws.get(Method::pi, 1e-12).report.policy_improvements - ws.get(Method::pi, 1e-6).report.policy_improvements;
  o.require(gap <= 4, "N_P(1e-12) - N_P(1e-6) = " + std::to_string(gap));
}

void vehicle_plateau(Outcome& o) {
  Case& v = bench("three_gear");
  const double eps[] = {1e-3, 1e-6, 1e-12};
  const int vi[] = {337, 586, 1084};
  int lo = 1 << 30, hi = 0;
  for (double e : eps) {
    const int n = v.get(Method::pi, e).report.policy_improvements;
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  o.require(hi - lo <= 1, "PI improvements in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  o.require(hi <= 9, "max PI improvements " + std::to_string(hi));
  for (int k = 0; k < 3; ++k) {
    const int n = v.get(Method::vi, eps[k]).report.iterations;
    o.require(within(n, vi[k], kCountBand), "VI(" + num(eps[k]) + ")=" + std::to_string(n) + " vs " + std::to_string(vi[k]));
  }
}

void parity(Outcome& o, const std::string& name, const std::vector<double>& eps, const std::vector<int>& published) {
  Case& c = bench(name);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const int nv = c.get(Method::vi, eps[k]).report.iterations;
    const int nm = c.get(Method::mpi, eps[k]).report.iterations;
    o.require(within(nm, nv, kParityBand), "MPI/VI(" + num(eps[k]) + ") " + std::to_string(nm) + "/" + std::to_string(nv));
    if (published[k] > 0)
      o.require(within(nv, published[k], kCountBand), "VI(" + num(eps[k]) + ")=" + std::to_string(nv) + " vs " +
                                                          std::to_string(published[k]));
  }
}

void chemo_parity(Outcome& o) { parity(o, "chemotherapy", {1e-3, 1e-6}, {192, 528}); }
void inverter_parity(Outcome& o) { parity(o, "dc_ac_inverter", {1e-3, 1e-6}, {469, 0}); }

void agreement(Outcome& o) {
  const double eps = 1e-6;
  for (const std::string name : {"weak_strong", "three_gear", "chemotherapy", "dc_ac_inverter"}) {
    Case& c = bench(name);
    std::vector<Method> methods{Method::vi, Method::mpi};
    if (c.spec.problem.dim == 1) methods.push_back(Method::pi);
    double worst = 0.0;
    for (std::size_t a = 0; a < methods.size(); ++a)
      for (std::size_t b = a + 1; b < methods.size(); ++b)
        worst = std::max(worst, field_difference(c, c.get(methods[a], eps).field, c.get(methods[b], eps).field));
    o.require(worst <= kAgreementFactor * eps, name + " " + num(worst));
  }
}

void analytic_oracle(Outcome& o) {
  HybridProblem p;
  p.name = "constant";
  p.dim = 1;
  p.modes = 1;
  p.discount = 1.0;
  p.controls = {0.0, 1.0};
  p.dynamics = [](const Point&, int, double) { return Point(0.0); };
  p.running_cost = [](const Point&, int, double) { return 1.0; };
  const Grid g({{0.0, 1.0}}, {11}, 1);
  const BellmanOperator op(p, g, SchemeParams::make(0.1, 1.0, 11));
  const double exact = 0.1 / (1.0 - std::exp(-0.1));
  for (Method m : {Method::vi, Method::pi, Method::mpi}) {
    SolverConfig c;
    c.method = m;
    c.tolerance = 1e-13;
    const SolveResult r = solve(op, c);
    double err = 0.0;
    for (double v : r.field) err = std::max(err, std::abs(v - exact));
    o.require(err <= kOracleTol, std::string(to_string(m)) + " error " + num(err));
  }
}

double worst_increase(const std::vector<ValueField>& seq) {
  double worst = 0.0;
  for (std::size_t j = 1; j < seq.size(); ++j)
    for (std::size_t i = 0; i < seq[j].size(); ++i) worst = std::max(worst, seq[j][i] - seq[j - 1][i]);
  return worst;
}

void monotone_decrease(Outcome& o) {
  for (const std::string name : {"weak_strong", "chemotherapy"}) {
    Case& c = bench(name);
    std::vector<Method> methods{Method::mpi};
    if (c.spec.problem.dim == 1) methods.insert(methods.begin(), Method::pi);
    for (Method m : methods) {
      std::vector<ValueField> seq{default_initial_field(*c.op)};
      SolverConfig cfg = c.config(m, 1e-6);
      cfg.initial_field.reset();
      cfg.observer = [&seq](const IterationEvent& e) {
        if (e.improvement) seq.push_back(*e.field);
      };
      solve(*c.op, cfg);
      const double inc = worst_increase(seq);
      o.require(inc <= kMonotoneSlack, name + " " + to_string(m) + " max increase " + num(inc) + " over " +
                                           std::to_string(seq.size() - 1) + " improvements");
    }
  }
}

void consistency(Outcome& o) {
  BenchmarkSpec ws = weak_strong();
  ws.grid.nodes = {50};
  const Grid g = ws.make_grid();
  const SchemeParams params = ws.make_params();
  const BellmanOperator op(ws.problem, g, params);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ValueField v(g.size());
    for (double& x : v) x = u(rng);
    const AssembledSystem sys = assemble_B(ws.problem, g, params, greedy_policy(op, v));
    const auto bv = matvec(sys.B, v);
    const auto tv = bellman_apply(op, v).field;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(bv[i] + v[i] - sys.c[i] - tv[i]));
  }
  o.require(worst <= kConsistencyTol, "max entry error " + num(worst));
}

void contraction(Outcome& o) {
  BenchmarkSpec ws = weak_strong();
  ws.grid.nodes = {50};
  const Grid g = ws.make_grid();
  const BellmanOperator op(ws.problem, g, ws.make_params());
  const double gamma = ws.make_params().discount_factor;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> up(0.0, 1.0);
  double contraction_excess = -1.0, order_excess = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    ValueField a(g.size()), b(g.size()), c(g.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = a[i] + up(rng);
    }
    const auto ta = bellman_apply(op, a).field;
    const auto tb = bellman_apply(op, b).field;
    const auto tc = bellman_apply(op, c).field;
    contraction_excess = std::max(contraction_excess, sup_distance(ta, tb) - gamma * sup_distance(a, b));
    for (std::size_t i = 0; i < a.size(); ++i) order_excess = std::max(order_excess, ta[i] - tc[i]);
  }
  o.require(contraction_excess <= kContractionSlack, "contraction excess " + num(contraction_excess));
  o.require(order_excess <= kContractionSlack, "order violation " + num(order_excess));
}

Trajectory trajectory_of(Case& c, const Point& x0, int q0) {
  const SolveResult& r = c.get(c.spec.problem.dim == 1 ? Method::pi : Method::vi, 1e-6);
  return synthesize(*c.op, r.field, x0, q0, c.spec.trajectory.horizon);
}

void trajectories(Outcome& o) {
  {
    Case& ws = bench("weak_strong");
    const Trajectory t = trajectory_of(ws, Point(0.5), 1);
    bool inside = true;
    for (const auto& s : t.samples) inside = inside && std::abs(s.x[0]) <= 1.0;
    o.require(inside, "weak-strong stays in [-1,1]");
    o.require(t.switch_events.size() >= 2, "weak-strong switches " + std::to_string(t.switch_events.size()));
  }
  {
    Case& v = bench("three_gear");
    const Trajectory t = trajectory_of(v, Point(0.28), 1);
    int top = 0;
    double sum = 0.0;
    int count = 0;
    for (const auto& s : t.samples) {
      top = std::max(top, s.mode);
      if (s.t >= v.spec.trajectory.horizon - 2.0 - 1e-9) {
        sum += s.control;
        ++count;
      }
    }
    const double avg = count ? sum / count : 0.0;
    o.require(top == 3, "vehicle top gear " + std::to_string(top));
    o.require(avg >= 0.4 && avg <= 0.6, "vehicle final control average " + num(avg));

    const Trajectory fast = trajectory_of(v, Point(14.58), 1);
    std::size_t first = fast.samples.size();
    for (std::size_t j = 0; j < fast.samples.size(); ++j)
      if (fast.samples[j].mode == 3) {
        first = j;
        break;
      }
    bool decel = first < fast.samples.size() && first > 0;
    for (std::size_t j = 1; decel && j <= first; ++j) decel = fast.samples[j].x[0] < fast.samples[j - 1].x[0];
    o.require(decel, "vehicle from 14.58 decelerates before gear 3");
  }
  {
    Case& c = bench("chemotherapy");
    const Trajectory t = trajectory_of(c, c.spec.trajectory.x0, c.spec.trajectory.q0);
    int alternations = 0;
    int last = 0;
    for (const auto& ev : t.switch_events) {
      if (ev.t <= 20.0) continue;
      if (ev.to_mode != last) ++alternations;
      last = ev.to_mode;
    }
    o.require(alternations >= 4, "chemo alternating switches after t=20: " + std::to_string(alternations));
  }
  {
    Case& c = bench("dc_ac_inverter");
    const Trajectory t = trajectory_of(c, c.spec.trajectory.x0, c.spec.trajectory.q0);
    const InverterParams p;
    int total = 0, good = 0;
    for (const auto& s : t.samples) {
      if (s.t < kInverterTransient) continue;
      ++total;
      const double e = s.x[0] * s.x[0] / (p.a * p.a) + s.x[1] * s.x[1] / (p.b * p.b) - p.c;
      good += std::abs(e) <= kEllipseBand * p.c;
    }
    const double share = total ? static_cast<double>(good) / total : 0.0;
    o.require(share >= kEllipseShare, "inverter on-ellipse share " + num(share));
  }
}

void value_coincidence(Outcome& o) {
  const double eps = 1e-6;
  for (const std::string name : {"chemotherapy", "dc_ac_inverter"}) {
    Case& c = bench(name);
    const ValueField& v = c.get(Method::vi, eps).field;
    const Grid& g = *c.grid;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.nodes(); ++i)
      for (int k = 1; k <= g.modes(); ++k)
        for (int l = k + 1; l <= g.modes(); ++l) worst = std::max(worst, std::abs(v[g.offset(i, k)] - v[g.offset(i, l)]));
    if (c.spec.solver.norm == StoppingNorm::relative_l1_update) worst /= sup_norm(v);
    o.require(worst <= kAgreementFactor * eps, name + " cross-mode difference " + num(worst));
  }
}

void refinement(Outcome& o) {
  // Nested grids: n, 2n - 1, 4n - 3 nodes with dt, dt/2, dt/4.
  const BenchmarkSpec base = weak_strong();
  const std::size_t n = base.grid.nodes.front();
  std::vector<ValueField> fields;
  std::vector<std::unique_ptr<Grid>> grids;
  for (std::size_t level = 0; level < 3; ++level) {
    BenchmarkSpec s = base;
    const std::size_t factor = std::size_t{1} << level;
    s.grid.dt = base.grid.dt / static_cast<double>(factor);
    s.grid.nodes = {factor * (n - 1) + 1};
    grids.push_back(std::make_unique<Grid>(s.make_grid()));
    BellmanOperator op(s.problem, *grids.back(), s.make_params());
    op.set_threads(default_threads());
    SolverConfig c;
    c.method = Method::pi;
    c.tolerance = 1e-10;
    fields.push_back(solve(op, c).field);
  }
  auto diff = [&](std::size_t fine) {
    const std::size_t step = std::size_t{1} << fine;
    double d = 0.0;
    for (int q = 1; q <= 2; ++q)
      for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(fields[fine - 1][grids[fine - 1]->offset(i * (step / 2), q)] -
                                 fields[fine][grids[fine]->offset(i * step, q)]));
    return d;
  };
  const double d1 = diff(1), d2 = diff(2);
  o.require(d2 < d1, "successive differences " + num(d1) + ", " + num(d2));
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "weak-strong iteration counts", weak_strong_counts},
      {2, "VI geometric / PI fast convergence", convergence_shape},
      {3, "vehicle PI plateau and VI counts", vehicle_plateau},
      {4, "chemotherapy MPI vs VI", chemo_parity},
      {5, "inverter MPI vs VI (relative l1)", inverter_parity},
      {6, "fixed-point agreement across solvers", agreement},
      {7, "analytic constant-cost oracle", analytic_oracle},
      {8, "monotone decrease of PI / MPI", monotone_decrease},
      {9, "assembly matches the Bellman sweep", consistency},
      {10, "contraction and monotonicity", contraction},
      {11, "qualitative trajectories", trajectories},
      {12, "cross-mode value coincidence", value_coincidence},
      {13, "grid refinement trend", refinement},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      c.check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
