#include "hybridsl/synthesis.hpp"

#include "hybridsl/format.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace hybridsl {

ControlStrategy strategy_of(const Trajectory& trajectory) {
  ControlStrategy s;
  for (const auto& smp : trajectory.samples) s.continuous_control.emplace_back(smp.t, smp.control);
  for (const auto& ev : trajectory.switch_events) {
    if (ev.kind == JumpKind::autonomous)
      s.autonomous_choices.push_back(ev.jump_control);
    else
      s.controlled_jumps.emplace_back(ev.t, HybridState{ev.arrival, ev.to_mode});
  }
  return s;
}

Trajectory synthesize(const BellmanOperator& op, const ValueField& field, const Point& x0, int q0, double horizon) {
  const HybridProblem& p = op.problem();
  const Grid& grid = op.grid();
  const double dt = op.params().dt;
  if (q0 < 1 || q0 > p.modes) throw std::out_of_range("initial mode out of range");
  if (!grid.contains(x0)) throw std::out_of_range("initial state outside the computational domain");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

  Trajectory traj;
  traj.dt = dt;
  traj.horizon = horizon;
  const auto steps = static_cast<long>(std::llround(horizon / dt));
  traj.samples.reserve(static_cast<std::size_t>(steps));

  Point x = x0;
  int q = q0;
  for (long j = 0; j < steps; ++j) {
    const double t = static_cast<double>(j) * dt;
    int jumps = 0;
    for (;;) {
      SwitchEvent ev;
      ev.t = t;
      ev.x = x;
      ev.from_mode = q;
      if (p.in_autonomous_set(x, q)) {
        const NodeDecision d = autonomous_at(op, field, x, q);
        const HybridState y = p.transition(x, q, d.jump_index);
        ev.kind = JumpKind::autonomous;
        ev.jump_control = d.jump_index;
        ev.to_mode = y.mode;
        ev.arrival = y.x;
      } else if (p.in_controlled_set(x, q)) {
        // Each destination is scored by the continuous branch it lands on, so that
        // interpolated values cannot send the state back and forth in zero time.
        const NodeDecision s = sigma_at(op, field, x, q);
        const auto dests = controlled_destinations(p, x, q);
        double best = s.value - kJumpTieTolerance;
        int pick = -1;
        for (std::size_t k = 0; k < dests.size(); ++k) {
          const Point arrival = grid.clamp(dests[k].x).first;
          const double c = p.controlled_cost ? p.controlled_cost(x, q, dests[k].x, dests[k].mode) : 0.0;
          const double value = c + sigma_at(op, field, arrival, dests[k].mode).value;
          if (value < best) {
            best = value;
            pick = static_cast<int>(k);
          }
        }
        if (pick < 0) break;
        const HybridState y = dests[static_cast<std::size_t>(pick)];
        ev.kind = JumpKind::controlled;
        ev.to_mode = y.mode;
        ev.arrival = y.x;
      } else {
        break;
      }
      if (++jumps > p.modes)
        throw ZenoError("more than " + std::to_string(p.modes) + " consecutive zero-time jumps at t = " +
                        fmt_double(t));
      traj.switch_events.push_back(ev);
      x = grid.clamp(ev.arrival).first;
      q = ev.to_mode;
    }

    const NodeDecision s = sigma_at(op, field, x, q);
    traj.samples.push_back({t, x, q, s.control});
    const Point f = p.dynamics(x, q, s.control);
    Point next = x;
    for (int k = 0; k < x.dim; ++k) {
      next[k] = x[k] + dt * f[k];
      if (!std::isfinite(next[k])) throw std::domain_error("non-finite state at t = " + fmt_double(t));
    }
    x = grid.clamp(next).first;
  }
  traj.accumulated_cost = evaluate_cost(p, traj);
  return traj;
}

double evaluate_cost(const HybridProblem& p, const Trajectory& traj) {
  const double lambda = p.discount;
  double cost = 0.0;
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    const auto& s = traj.samples[j];
    if (j > 0 && !(s.t > traj.samples[j - 1].t)) throw std::invalid_argument("trajectory time stamps must increase");
    cost += traj.dt * p.running_cost(s.x, s.mode, s.control) * std::exp(-lambda * s.t);
  }
  for (std::size_t k = 0; k < traj.switch_events.size(); ++k) {
    const auto& ev = traj.switch_events[k];
    if (k > 0 && ev.t < traj.switch_events[k - 1].t)
      throw std::invalid_argument("switch event time stamps must not decrease");
    const double c = ev.kind == JumpKind::autonomous
                         ? (p.autonomous_cost ? p.autonomous_cost(ev.x, ev.from_mode, ev.jump_control) : 0.0)
                         : (p.controlled_cost ? p.controlled_cost(ev.x, ev.from_mode, ev.arrival, ev.to_mode) : 0.0);
    cost += c * std::exp(-lambda * ev.t);
  }
  return cost;
}

double tail_bound(double max_abs_running_cost, double lambda, double horizon) {
  return max_abs_running_cost * std::exp(-lambda * horizon) / lambda;
}

namespace {

void write_point(std::ostream& out, const Point& x) {
  for (int k = 0; k < x.dim; ++k) out << ',' << fmt_double(x[k]);
}

void write_point_header(std::ostream& out, int dim, const char* prefix) {
  for (int k = 0; k < dim; ++k) out << ',' << prefix << k;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int dim = traj.samples.empty() ? 1 : traj.samples.front().x.dim;
  out << 't';
  write_point_header(out, dim, "x");
  out << ",q,alpha\n";
  for (const auto& s : traj.samples) {
    out << fmt_double(s.t);
    write_point(out, s.x);
    out << ',' << s.mode << ',' << fmt_double(s.control) << '\n';
  }
}

void write_switches_csv(std::ostream& out, const Trajectory& traj) {
  const int dim = traj.samples.empty() ? 1 : traj.samples.front().x.dim;
  out << "t,kind,from,to";
  write_point_header(out, dim, "x");
  out << '\n';
  for (const auto& ev : traj.switch_events) {
    out << fmt_double(ev.t) << ',' << (ev.kind == JumpKind::autonomous ? "autonomous" : "controlled") << ','
        << ev.from_mode << ',' << ev.to_mode;
    write_point(out, ev.x);
    out << '\n';
  }
}

}  // namespace hybridsl
