#include "fixtures.hpp"

#include "hybridsl/bellman.hpp"
#include "hybridsl/linalg.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hybridsl;

namespace {

const SchemeParams kParams = SchemeParams::make(0.1, 1.0, 11);

// Two-mode problem on [0, 1] with 3 nodes where mode 1 must jump.
HybridProblem forced_jump_problem(std::vector<HybridState (*)(const Point&)> targets, std::vector<double> costs,
                                  int modes) {
  HybridProblem p = fixtures::constant_problem(1.0, 1.0, 0.0, modes);
  p.autonomous_set = [](const Point&, int q) { return q == 1; };
  for (std::size_t w = 0; w < targets.size(); ++w) p.jump_controls.push_back("w" + std::to_string(w));
  p.transition = [targets](const Point& x, int, int w) { return targets[static_cast<std::size_t>(w)](x); };
  p.autonomous_cost = [costs](const Point&, int, int w) { return costs[static_cast<std::size_t>(w)]; };
  return p;
}

}  // namespace

TEST_CASE("sigma of a jump-free constant problem") {
  const HybridProblem p = fixtures::constant_problem(2.0);
  const Grid g({{0.0, 1.0}}, {5}, 1);
  const BellmanOperator op(p, g, kParams);
  const ValueField zero(g.size(), 0.0);
  const NodeDecision d = op.sigma(zero, 2);
  CHECK(d.value == doctest::Approx(0.2));
  CHECK(d.kind == Branch::continuous);
  // All controls tie; the smallest sample wins.
  CHECK(d.control == 0.0);

  const double fixed = 0.1 * 2.0 / (1.0 - std::exp(-0.1));
  const ValueField star(g.size(), fixed);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(op.sigma(star, i).value == doctest::Approx(fixed).epsilon(1e-14));
}

TEST_CASE("one sweep from zero") {
  const HybridProblem p = fixtures::constant_problem(1.0);
  const Grid g({{0.0, 1.0}}, {5}, 1);
  const BellmanOperator op(p, g, kParams);
  const SweepResult r = bellman_apply(op, ValueField(g.size(), 0.0));
  for (double v : r.field) CHECK(v == doctest::Approx(0.1));
}

TEST_CASE("autonomous jump operator") {
  const Grid g({{0.0, 1.0}}, {3}, 3);
  SUBCASE("single jump") {
    const HybridProblem p =
        forced_jump_problem({[](const Point& x) { return HybridState{x, 2}; }}, {0.2}, 2);
    const Grid g2({{0.0, 1.0}}, {3}, 2);
    const BellmanOperator op(p, g2, kParams);
    ValueField v(g2.size(), 0.0);
    v[g2.offset(1, 2)] = 3.0;
    const NodeDecision d = op.autonomous(v, g2.offset(1, 1));
    CHECK(d.value == doctest::Approx(3.2));
    CHECK(d.jump_index == 0);
    CHECK(d.destination_mode == 2);
    CHECK(op.node(v, g2.offset(1, 1)).kind == Branch::autonomous_jump);
    CHECK_THROWS(op.autonomous(v, g2.offset(1, 2)));
  }
  SUBCASE("cheapest of two jumps") {
    const HybridProblem p = forced_jump_problem({[](const Point& x) { return HybridState{x, 2}; },
                                                 [](const Point& x) { return HybridState{x, 3}; }},
                                                {0.2, 0.0}, 3);
    const BellmanOperator op(p, g, kParams);
    ValueField v(g.size(), 0.0);
    v[g.offset(0, 2)] = 3.0;
    v[g.offset(0, 3)] = 2.9;
    const NodeDecision d = op.autonomous(v, g.offset(0, 1));
    CHECK(d.value == doctest::Approx(2.9));
    CHECK(d.jump_index == 1);
  }
  SUBCASE("off-grid arrival interpolates") {
    const HybridProblem p =
        forced_jump_problem({[](const Point& x) { return HybridState{Point(std::min(x[0] + 0.25, 1.0)), 2}; }}, {0.0}, 2);
    const Grid g2({{0.0, 1.0}}, {3}, 2);
    const BellmanOperator op(p, g2, kParams);
    ValueField v(g2.size(), 0.0);
    v[g2.offset(0, 2)] = 1.0;
    v[g2.offset(1, 2)] = 2.0;
    CHECK(op.autonomous(v, g2.offset(0, 1)).value == doctest::Approx(1.5));
  }
}

TEST_CASE("controlled jump operator") {
  SUBCASE("one destination") {
    const HybridProblem p = fixtures::switching_problem(2, 0.1);
    const Grid g({{0.0, 1.0}}, {3}, 2);
    const BellmanOperator op(p, g, kParams);
    ValueField v(g.size(), 0.0);
    v[g.offset(2, 2)] = 5.0;
    const NodeDecision d = op.controlled(v, g.offset(2, 1));
    CHECK(d.value == doctest::Approx(5.1));
    CHECK(d.destination_mode == 2);
  }
  SUBCASE("best of two destinations, never the own mode") {
    const HybridProblem p = fixtures::switching_problem(3, 0.0);
    const Grid g({{0.0, 1.0}}, {3}, 3);
    const BellmanOperator op(p, g, kParams);
    ValueField v(g.size(), 0.0);
    v[g.offset(1, 1)] = 7.0;
    v[g.offset(1, 3)] = 6.5;
    v[g.offset(1, 2)] = -100.0;
    const NodeDecision d = op.controlled(v, g.offset(1, 2));
    CHECK(d.value == doctest::Approx(6.5));
    CHECK(d.destination_mode == 3);
  }
  SUBCASE("free switching returns the other mode's value") {
    const BenchmarkSpec chemo = chemotherapy();
    const Grid g = chemo.make_grid();
    const BellmanOperator op(chemo.problem, g, chemo.make_params());
    std::mt19937 rng(7);
    const ValueField v = fixtures::random_field(g.size(), rng);
    for (std::size_t i : {0ul, 517ul, 9999ul}) {
      CHECK(op.controlled(v, g.offset(i, 1)).value == v[g.offset(i, 2)]);
      CHECK(op.controlled(v, g.offset(i, 2)).value == v[g.offset(i, 1)]);
    }
  }
}

TEST_CASE("ties between continuing and switching keep the mode") {
  // l = 0, f = 0 and v = 0: Sigma = 0 = N.
  const HybridProblem p = fixtures::switching_problem(2, 0.0, 0.0);
  const Grid g({{0.0, 1.0}}, {4}, 2);
  const BellmanOperator op(p, g, kParams);
  const SweepResult r = bellman_apply(op, ValueField(g.size(), 0.0));
  for (const auto& d : r.decisions) CHECK(d.kind == Branch::continuous);
}

TEST_CASE("sigma picks the cheapest control sample") {
  // f = a, l = (a - 0.3)^2 with v = 0: argmin is the sample nearest 0.3.
  HybridProblem p = fixtures::constant_problem(0.0);
  p.controls = {-1.0, 1.0};
  p.dynamics = [](const Point&, int, double a) { return Point(a); };
  p.running_cost = [](const Point&, int, double a) { return (a - 0.3) * (a - 0.3); };
  const Grid g({{-5.0, 5.0}}, {11}, 1);
  const BellmanOperator op(p, g, SchemeParams::make(0.1, 1.0, 21));
  const NodeDecision d = op.sigma(ValueField(g.size(), 0.0), 5);
  CHECK(d.control == doctest::Approx(0.3));
  CHECK(d.control_index == 13);
}

TEST_CASE("feet outside the domain are clamped and penalized") {
  HybridProblem p = fixtures::constant_problem(0.0, 1.0, 1.0);
  p.boundary_penalty = 10.0;
  const Grid g({{0.0, 1.0}}, {3}, 1);
  const BellmanOperator op(p, g, SchemeParams::make(0.1, 1.0, 1));
  ValueField v{1.0, 2.0, 3.0};
  const double gamma = std::exp(-0.1);
  CHECK(op.sigma(v, 2).value == doctest::Approx(gamma * (3.0 + 10.0)));
  CHECK(op.sigma(v, 0).value == doctest::Approx(gamma * (1.0 + 0.2)));
  CHECK(op.any_clamped_foot());
}

TEST_CASE("qvi residual") {
  const HybridProblem p = fixtures::constant_problem(1.0);
  const Grid g({{0.0, 1.0}}, {5}, 1);
  const BellmanOperator op(p, g, kParams);
  const double gamma = std::exp(-0.1);
  const double fixed = 0.1 / (1.0 - gamma);
  CHECK(qvi_residual(op, ValueField(g.size(), fixed)) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(qvi_residual(op, ValueField(g.size(), fixed + 2.0)) == doctest::Approx(2.0 * (1.0 - gamma)));

  const BenchmarkSpec ws = weak_strong();
  const Grid wg = ws.make_grid();
  const BellmanOperator wop(ws.problem, wg, ws.make_params());
  const ValueField zero(wg.size(), 0.0);
  CHECK(qvi_residual(wop, zero) == sup_norm(bellman_apply(wop, zero).field));
}

TEST_CASE("T is a monotone contraction that commutes with constants on jump-free problems") {
  const BenchmarkSpec ws = fixtures::small_weak_strong();
  const Grid g = ws.make_grid();
  const BellmanOperator op(ws.problem, g, ws.make_params());
  const double gamma = ws.make_params().discount_factor;
  std::mt19937 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ValueField u = fixtures::random_field(g.size(), rng);
    ValueField w = fixtures::random_field(g.size(), rng);
    const auto tu = bellman_apply(op, u).field;
    const auto tw = bellman_apply(op, w).field;
    CHECK(sup_distance(tu, tw) <= gamma * sup_distance(u, w) + 1e-12);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + std::abs(w[i]);
    const auto tw2 = bellman_apply(op, w).field;
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(tu[i] <= tw2[i] + 1e-12);
  }

  HybridProblem flow = fixtures::constant_problem(1.0, 1.0, 0.3);
  flow.running_cost = [](const Point& x, int, double a) { return x[0] * x[0] + a; };
  const Grid fg({{-1.0, 1.0}}, {21}, 1);
  const BellmanOperator fop(flow, fg, kParams);
  const ValueField v = fixtures::random_field(fg.size(), rng);
  ValueField shifted = v;
  for (double& x : shifted) x += 0.7;
  const auto a = bellman_apply(fop, v).field;
  const auto b = bellman_apply(fop, shifted).field;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] - a[i] == doctest::Approx(std::exp(-0.1) * 0.7));
}

TEST_CASE("frozen sweeps replay the recorded branches") {
  const BenchmarkSpec ws = fixtures::small_weak_strong();
  const Grid g = ws.make_grid();
  const BellmanOperator op(ws.problem, g, ws.make_params());
  std::mt19937 rng(3);
  const ValueField v = fixtures::random_field(g.size(), rng);
  const SweepResult r = bellman_apply(op, v);
  ValueField frozen;
  op.apply_frozen(r.decisions, v, frozen);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(frozen[i] == r.field[i]);
}

TEST_CASE("off-grid evaluations agree with node evaluations at nodes") {
  const BenchmarkSpec ws = fixtures::small_weak_strong();
  const Grid g = ws.make_grid();
  const BellmanOperator op(ws.problem, g, ws.make_params());
  std::mt19937 rng(5);
  const ValueField v = fixtures::random_field(g.size(), rng);
  for (std::size_t i = 1; i + 1 < g.nodes(); i += 7)
    for (int q = 1; q <= 2; ++q) {
      CHECK(sigma_at(op, v, g.node(i), q).value == doctest::Approx(op.sigma(v, g.offset(i, q)).value).epsilon(1e-14));
      CHECK(controlled_at(op, v, g.node(i), q).value == doctest::Approx(op.controlled(v, g.offset(i, q)).value));
    }
  CHECK(autonomous_at(op, v, Point(1.0), 1).value == op.autonomous(v, g.offset(g.nodes() - 1, 1)).value);
}

TEST_CASE("threaded sweeps match the serial sweep") {
  const BenchmarkSpec chemo = chemotherapy();
  const Grid g = chemo.make_grid();
  BellmanOperator op(chemo.problem, g, chemo.make_params());
  std::mt19937 rng(11);
  const ValueField v = fixtures::random_field(g.size(), rng);
  const auto serial = bellman_apply(op, v).field;
  op.set_threads(4);
  CHECK(bellman_apply(op, v).field == serial);
}
