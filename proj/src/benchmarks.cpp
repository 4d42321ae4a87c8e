#include "hybridsl/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hybridsl {

Grid BenchmarkSpec::make_grid() const { return Grid(grid.bounds, grid.nodes, problem.modes); }

void BenchmarkSpec::set_dt(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  grid.dt = dt;
  if (spacing_speed > 0.0) grid.nodes = {nodes_for_spacing(grid.bounds.front(), dt * spacing_speed)};
}

SchemeParams BenchmarkSpec::make_params() const {
  return SchemeParams::make(grid.dt, problem.discount, grid.control_samples);
}

double sup_dynamics(const HybridProblem& p, const std::vector<Interval>& domain, int control_samples,
                    std::size_t samples_per_axis) {
  const auto controls = p.controls.sample(control_samples);
  const std::size_t ny = domain.size() > 1 ? samples_per_axis : 1;
  double best = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < samples_per_axis; ++ix) {
      Point x(domain[0].lo + (domain[0].hi - domain[0].lo) * static_cast<double>(ix) /
                                 static_cast<double>(samples_per_axis - 1));
      if (domain.size() > 1)
        x = Point(x[0], domain[1].lo + (domain[1].hi - domain[1].lo) * static_cast<double>(iy) /
                                           static_cast<double>(samples_per_axis - 1));
      for (int q = 1; q <= p.modes; ++q)
        for (double a : controls) {
          const Point f = p.dynamics(x, q, a);
          double norm = 0.0;
          for (int k = 0; k < x.dim; ++k) norm += f[k] * f[k];
          best = std::max(best, std::sqrt(norm));
        }
    }
  }
  return best;
}

BenchmarkSpec weak_strong(const WeakStrongParams& w) {
  BenchmarkSpec spec;
  spec.name = "weak_strong";
  HybridProblem& p = spec.problem;
  p.name = spec.name;
  p.dim = 1;
  p.modes = 2;
  p.discount = w.lambda;
  p.controls = {-1.0, 1.0};
  p.dynamics = [w](const Point& x, int q, double a) { return Point(x[0] + (q == 1 ? w.d1 : w.d2) * a); };
  p.running_cost = [w](const Point& x, int q, double a) { return x[0] * x[0] + (q == 1 ? w.c1 : w.c2) * a * a; };

  const Interval dom = w.domain;
  auto on_edge = [dom](const Point& x) { return x[0] <= dom.lo || x[0] >= dom.hi; };
  // Mode 1 must switch on reaching the edge of the domain.
  p.jump_controls = {"to_strong"};
  p.autonomous_set = [on_edge](const Point& x, int q) { return q == 1 && on_edge(x); };
  p.controlled_set = [on_edge](const Point& x, int q) { return !(q == 1 && on_edge(x)); };
  p.transition = [](const Point& x, int, int) { return HybridState{x, 2}; };
  p.autonomous_cost = [w](const Point&, int, int) { return w.c12; };
  p.destinations = switch_to_other_modes(2);
  p.controlled_cost = constant_switch_costs({{0.0, w.c12}, {w.c21, 0.0}});

  spec.spacing_speed = sup_dynamics(p, {dom}, 101);
  spec.grid = {{dom}, {}, 0.0, 101};
  spec.set_dt(w.dt);
  spec.trajectory = {Point(0.5), 1, w.horizon};
  return spec;
}

double ThreeGearParams::power_band(double rpm) const {
  if (rpm <= 0.0 || rpm >= max_rpm) return 0.0;
  const double s = rpm / max_rpm;
  return torque_scale * (s - s * s * s);
}

double ThreeGearParams::conversion(int q) const {
  return 60.0 / (wheel_radius * std::numbers::pi * ratio.at(static_cast<std::size_t>(q - 1)));
}

BenchmarkSpec three_gear(const ThreeGearParams& g) {
  BenchmarkSpec spec;
  spec.name = "three_gear";
  HybridProblem& p = spec.problem;
  p.name = spec.name;
  p.dim = 1;
  p.modes = static_cast<int>(g.ratio.size());
  p.discount = g.lambda;
  p.controls = {0.0, 1.0};
  p.dynamics = [g](const Point& x, int q, double a) {
    const double rho = g.ratio[static_cast<std::size_t>(q - 1)];
    const double torque = g.power_band(g.conversion(q) * x[0]);
    return Point((torque * a / (g.wheel_radius * rho) - g.drag * x[0] * x[0]) / g.mass);
  };
  p.running_cost = [g](const Point& x, int, double a) { return -g.c_x * x[0] + g.c_alpha * a; };
  p.controlled_set = [](const Point&, int) { return true; };
  p.destinations = switch_to_other_modes(p.modes);
  p.controlled_cost = [g](const Point&, int q, const Point&, int l) { return q == l ? 0.0 : g.switch_cost; };

  spec.spacing_speed = sup_dynamics(p, {g.domain}, 101);
  spec.grid = {{g.domain}, {}, 0.0, 101};
  spec.set_dt(g.dt);
  spec.trajectory = {Point(g.x0), 1, g.horizon};
  spec.solver.zero_initial_field = true;
  return spec;
}

BenchmarkSpec chemotherapy(const ChemotherapyParams& c) {
  BenchmarkSpec spec;
  spec.name = "chemotherapy";
  HybridProblem& p = spec.problem;
  p.name = spec.name;
  p.dim = 2;
  p.modes = 2;
  p.discount = c.lambda;
  p.controls = {0.0, 0.0};
  auto flow = [c](const Point& x, int q) {
    const double birth = q == 1 ? 2.0 * c.a2 * x[1] : 0.0;
    return Point(-c.a1 * x[0] + birth, c.a1 * x[0] - c.a2 * x[1]);
  };
  p.dynamics = [flow](const Point& x, int q, double) { return flow(x, q); };
  // Tumor growth rate along the active flow plus unit toxicity under treatment.
  p.running_cost = [c, flow](const Point& x, int q, double) {
    const Point f = flow(x, q);
    return c.r1 * f[0] + c.r2 * f[1] + static_cast<double>(q - 1);
  };
  p.controlled_set = [](const Point&, int) { return true; };
  p.destinations = switch_to_other_modes(2);
  p.controlled_cost = constant_switch_costs({{0.0, 0.0}, {0.0, 0.0}});

  spec.grid = {{c.domain, c.domain}, {c.nodes, c.nodes}, c.dt, 1};
  spec.trajectory = {c.x0, c.q0, c.horizon};
  return spec;
}

BenchmarkSpec dc_ac_inverter(const InverterParams& v) {
  BenchmarkSpec spec;
  spec.name = "dc_ac_inverter";
  HybridProblem& p = spec.problem;
  p.name = spec.name;
  p.dim = 2;
  p.modes = 3;
  p.discount = v.lambda;
  p.controls = {0.0, 0.0};
  p.dynamics = [v](const Point& x, int q, double) {
    return Point(v.v_dc / v.inductance * (q - 2) - v.resistance / v.inductance * x[0] - x[1] / v.inductance,
                 x[0] / v.capacitance);
  };
  p.running_cost = [v](const Point& x, int, double) {
    const double e = x[0] * x[0] / (v.a * v.a) + x[1] * x[1] / (v.b * v.b) - v.c;
    return e * e;
  };
  p.controlled_set = [](const Point&, int) { return true; };
  p.destinations = switch_to_other_modes(3);
  p.controlled_cost = [](const Point&, int, const Point&, int) { return 0.0; };
  p.boundary_penalty = v.boundary_penalty;

  spec.grid = {{v.domain, v.domain}, {v.nodes, v.nodes}, v.dt, 1};
  spec.trajectory = {v.x0, v.q0, v.horizon};
  spec.solver.norm = StoppingNorm::relative_l1_update;
  return spec;
}

std::vector<std::string> benchmark_names() { return {"weak_strong", "three_gear", "chemotherapy", "dc_ac_inverter"}; }

BenchmarkSpec benchmark_by_name(const std::string& name) {
  if (name == "weak_strong") return weak_strong();
  if (name == "three_gear") return three_gear();
  if (name == "chemotherapy") return chemotherapy();
  if (name == "dc_ac_inverter") return dc_ac_inverter();
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

}  // namespace hybridsl
