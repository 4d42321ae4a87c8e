#pragma once

#include "hybridsl/bellman.hpp"
#include "hybridsl/grid.hpp"
#include "hybridsl/hybrid_model.hpp"
#include "hybridsl/solvers.hpp"

#include <string>
#include <vector>

namespace hybridsl {

struct GridDefaults {
  std::vector<Interval> bounds;
  std::vector<std::size_t> nodes;
  double dt = 0.1;
  int control_samples = 101;
};

struct TrajectoryDefaults {
  Point x0;
  int q0 = 1;
  double horizon = 10.0;
};

struct SolverDefaults {
  StoppingNorm norm = StoppingNorm::sup_update;
  int inner_sweeps = 10;
  int warmup_vi = 10;
  /// Start from v = 0 instead of the constant supersolution.
  bool zero_initial_field = false;
};

struct BenchmarkSpec {
  std::string name;
  HybridProblem problem;
  GridDefaults grid;
  TrajectoryDefaults trajectory;
  SolverDefaults solver;
  /// When positive, the 1D node count follows dx = dt * spacing_speed.
  double spacing_speed = 0.0;

  /// Changes dt and, for specs with a spacing_speed, the node count with it.
  void set_dt(double dt);
  Grid make_grid() const;
  SchemeParams make_params() const;
};

/// Two-mode stabilization: f = x + d_q a, l = x^2 + c_q a^2, a in [-1, 1].
struct WeakStrongParams {
  double d1 = 0.5;
  double d2 = 2.0;
  double c12 = 0.2;
  double c21 = 0.0;
  double c1 = 0.25;
  double c2 = 4.0;
  double lambda = 1.0;
  double horizon = 20.0;
  double dt = 0.0067;
  Interval domain{-1.0, 1.0};
};

/// Three-gear scooter: speed dynamics through the engine power band.
struct ThreeGearParams {
  double mass = 140.0;                       // kg
  std::vector<double> ratio{0.06, 0.09, 0.12};
  double wheel_radius = 0.2;                 // m
  double drag = 0.3;
  double torque_scale = 10.0;                // tau, N m
  double max_rpm = 6000.0;                   // nu, 1/min
  double c_alpha = 1.0;
  double c_x = 0.5;
  double switch_cost = 0.1;
  double lambda = 1.0;
  double horizon = 10.0;                     // s
  double dt = 0.027;                         // s
  Interval domain{0.0, 16.0};                // m/s
  double x0 = 0.28;

  /// tau (w/nu - (w/nu)^3) on [0, nu], zero beyond the red line.
  double power_band(double rpm) const;
  /// Crankshaft r.p.m. per unit speed in gear q.
  double conversion(int q) const;
};

/// Two-compartment tumor model with bang-bang chemotherapy as two modes.
struct ChemotherapyParams {
  double a1 = 0.197;
  double a2 = 0.356;
  double r1 = 6.94;
  double r2 = 3.94;
  double lambda = 0.1;
  Point x0{2.0, 1.0};
  int q0 = 1;
  double horizon = 60.0;
  double dt = 0.1;
  std::size_t nodes = 100;
  Interval domain{0.0, 2.0};
};

/// Single-phase DC/AC inverter with an RLC load; modes are switch configurations.
struct InverterParams {
  double v_dc = 200.0;
  double resistance = 0.7;
  double inductance = 0.1;
  double capacitance = 0.1;
  double omega = 6.283185307179586;
  double c = 22500.0;
  double a = 0.84;
  double b = 1.34;
  double lambda = 1.0;
  Point x0{0.0, 200.0};
  int q0 = 2;
  double horizon = 5.0;
  double dt = 0.01;
  std::size_t nodes = 100;
  Interval domain{-250.0, 250.0};
  double boundary_penalty = 5e8;
};

BenchmarkSpec weak_strong(const WeakStrongParams& params = {});
BenchmarkSpec three_gear(const ThreeGearParams& params = {});
BenchmarkSpec chemotherapy(const ChemotherapyParams& params = {});
BenchmarkSpec dc_ac_inverter(const InverterParams& params = {});

/// Stable identifiers: weak_strong, three_gear, chemotherapy, dc_ac_inverter.
BenchmarkSpec benchmark_by_name(const std::string& name);
std::vector<std::string> benchmark_names();

/// max |f| over a dense sampling of the domain, the modes and the control samples.
double sup_dynamics(const HybridProblem& problem, const std::vector<Interval>& domain, int control_samples,
                    std::size_t samples_per_axis = 1001);

}  // namespace hybridsl
