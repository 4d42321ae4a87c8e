#pragma once

#include "hybridsl/benchmarks.hpp"
#include "hybridsl/hybrid_model.hpp"

#include <random>
#include <vector>

namespace fixtures {

using namespace hybridsl;

/// f = speed, l = cost, no jump sets.
inline HybridProblem constant_problem(double cost, double lambda = 1.0, double speed = 0.0, int modes = 1) {
  HybridProblem p;
  p.name = "constant";
  p.dim = 1;
  p.modes = modes;
  p.discount = lambda;
  p.controls = {0.0, 1.0};
  p.dynamics = [speed](const Point&, int, double) { return Point(speed); };
  p.running_cost = [cost](const Point&, int, double) { return cost; };
  return p;
}

/// Controlled switching between `modes` modes everywhere at a constant cost.
inline HybridProblem switching_problem(int modes, double switch_cost, double cost = 1.0) {
  HybridProblem p = constant_problem(cost, 1.0, 0.0, modes);
  p.controlled_set = [](const Point&, int) { return true; };
  p.destinations = switch_to_other_modes(modes);
  p.controlled_cost = [switch_cost](const Point&, int, const Point&, int) { return switch_cost; };
  return p;
}

/// Weak-strong benchmark on a coarse grid, for tests that need many sweeps.
inline BenchmarkSpec small_weak_strong(std::size_t nodes = 41) {
  BenchmarkSpec spec = weak_strong();
  spec.grid.nodes = {nodes};
  return spec;
}

inline ValueField random_field(std::size_t size, std::mt19937& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ValueField v(size);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace fixtures
