#pragma once

#include "hybridsl/bellman.hpp"
#include "hybridsl/hybrid_model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace hybridsl {

struct TrajectorySample {
  double t = 0.0;
  Point x;
  int mode = 1;
  double control = 0.0;
};

enum class JumpKind { autonomous, controlled };

struct SwitchEvent {
  double t = 0.0;
  JumpKind kind = JumpKind::controlled;
  int from_mode = 1;
  int to_mode = 1;
  Point x;           // state before the jump
  Point arrival;     // state after the jump
  int jump_control = -1;  // w for autonomous jumps
};

/// Closed-loop hybrid trajectory. Samples are dt apart; jumps take zero time and
/// are resolved before the sample at the same time stamp is recorded.
struct Trajectory {
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<TrajectorySample> samples;
  std::vector<SwitchEvent> switch_events;
  double accumulated_cost = 0.0;
};

/// The realized control strategy: control signal, autonomous choices w_i and
/// controlled jumps (xi_k, x'_k, q'_k).
struct ControlStrategy {
  std::vector<std::pair<double, double>> continuous_control;
  std::vector<int> autonomous_choices;
  std::vector<std::pair<double, HybridState>> controlled_jumps;
};

ControlStrategy strategy_of(const Trajectory& trajectory);

class ZenoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tie tolerance for controlled jumps: N must beat Sigma by more than this.
inline constexpr double kJumpTieTolerance = 1e-9;

/// Forward-Euler closed loop driven by the scheme's minimization at the current state.
Trajectory synthesize(const BellmanOperator& op, const ValueField& field, const Point& x0, int q0, double horizon);

/// Rectangle-rule discounted cost of a trajectory plus discounted jump costs.
/// Throws std::invalid_argument on non-increasing time stamps.
double evaluate_cost(const HybridProblem& problem, const Trajectory& trajectory);

/// Bound sup|l| e^{-lambda t_f} / lambda on the cost neglected past the horizon.
double tail_bound(double max_abs_running_cost, double lambda, double horizon);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_switches_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace hybridsl
