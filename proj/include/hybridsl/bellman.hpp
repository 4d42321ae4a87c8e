#pragma once

#include "hybridsl/grid.hpp"
#include "hybridsl/hybrid_model.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace hybridsl {

/// Time step, cached discount factor e^{-lambda dt} and control sampling.
struct SchemeParams {
  double dt = 0.1;
  double discount_factor = 0.0;
  int control_samples = 101;

  static SchemeParams make(double dt, double lambda, int control_samples = 101);
};

enum class Branch { continuous, autonomous_jump, controlled_jump };

const char* to_string(Branch kind);

/// Argmin of the node-wise scheme and the value it attains.
struct NodeDecision {
  Branch kind = Branch::continuous;
  int control_index = -1;     // into the control samples (continuous)
  double control = 0.0;
  int jump_index = -1;        // w (autonomous) or destination candidate (controlled)
  int destination_mode = 0;
  double value = 0.0;
};

/// The discrete operators Sigma, M, N and T = their node-wise combination.
///
/// Construction evaluates every closure of the problem once per node and
/// control sample; the operator is then a set of stencils and constants, so
/// sweeps never call back into the problem. Off-grid evaluations (used by
/// trajectory synthesis) go through the closures with the same arithmetic.
class BellmanOperator {
 public:
  BellmanOperator(const HybridProblem& problem, const Grid& grid, const SchemeParams& params);

  const HybridProblem& problem() const { return *problem_; }
  const Grid& grid() const { return *grid_; }
  const SchemeParams& params() const { return params_; }
  const std::vector<double>& controls() const { return controls_; }
  std::size_t size() const { return grid_->size(); }

  bool is_autonomous(std::size_t flat) const { return kind_[flat] == NodeKind::autonomous; }
  bool is_controlled(std::size_t flat) const { return kind_[flat] == NodeKind::controlled; }

  /// Sigma at node `flat` (0-based storage index): min over control samples,
  /// ties to the smallest control.
  NodeDecision sigma(const ValueField& field, std::size_t flat) const;
  /// M at an autonomous-set node, ties to the lowest w. Throws elsewhere.
  NodeDecision autonomous(const ValueField& field, std::size_t flat) const;
  /// N at a controlled-set node over destinations with q' != q, ties to the lowest mode.
  NodeDecision controlled(const ValueField& field, std::size_t flat) const;
  /// Right-hand side of the node-wise scheme. Continuous wins ties against N.
  NodeDecision node(const ValueField& field, std::size_t flat) const;

  /// One Jacobi sweep. `decisions` may be null.
  void apply(const ValueField& field, ValueField& out, std::vector<NodeDecision>* decisions) const;
  /// Frozen-policy sweep: re-evaluates each node's recorded branch without minimizing.
  void apply_frozen(const std::vector<NodeDecision>& decisions, const ValueField& field,
                    ValueField& out) const;
  /// Value of the branch recorded in `decision` at node `flat`.
  double branch_value(const NodeDecision& decision, const ValueField& field, std::size_t flat) const;

  /// Largest positive part of the running cost over nodes and control samples.
  double max_running_cost() const { return max_running_cost_; }
  /// Smallest running cost over nodes and control samples (at most 0).
  double min_running_cost() const { return min_running_cost_; }
  double max_jump_cost() const { return max_jump_cost_; }
  /// Whether any continuous candidate has a foot that was clamped to the boundary.
  bool any_clamped_foot() const { return any_clamped_; }

  void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }
  int threads() const { return threads_; }

 private:
  enum class NodeKind : unsigned char { plain, autonomous, controlled };

  struct Candidate {
    Stencil stencil;       // flat offsets
    double cost = 0.0;     // dt*l (continuous) or jump cost
    double penalty = 0.0;  // boundary penalty picked up at the foot
    int mode = 0;          // destination mode (jumps)
    int label = 0;         // w or destination index (jumps)
  };

  double continuous_value(const Candidate& c, const ValueField& field) const {
    return c.cost + params_.discount_factor * (c.stencil.apply(field.data()) + c.penalty);
  }
  static double jump_value(const Candidate& c, const ValueField& field) {
    return c.stencil.apply(field.data()) + c.cost;
  }

  const HybridProblem* problem_;
  const Grid* grid_;
  SchemeParams params_;
  std::vector<double> controls_;
  std::vector<NodeKind> kind_;
  std::vector<Candidate> flow_;               // size() * controls_.size()
  std::vector<std::size_t> jump_begin_;       // CSR offsets into jumps_
  std::vector<Candidate> jumps_;
  double max_running_cost_ = 0.0;
  double min_running_cost_ = 0.0;
  double max_jump_cost_ = 0.0;
  bool any_clamped_ = false;
  int threads_ = 1;
};

/// Result of a Jacobi sweep with per-node argmins.
struct SweepResult {
  ValueField field;
  std::vector<NodeDecision> decisions;
};

SweepResult bellman_apply(const BellmanOperator& op, const ValueField& field);

/// Sup-norm residual ||T(v) - v|| of the discrete quasi-variational inequality.
double qvi_residual(const BellmanOperator& op, const ValueField& field);

/// Controlled-jump candidates with q' != q, ordered by destination mode.
std::vector<HybridState> controlled_destinations(const HybridProblem& problem, const Point& x, int q);

/// Off-grid counterparts of Sigma, M and N, evaluated through the problem closures.
NodeDecision sigma_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q);
NodeDecision autonomous_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q);
NodeDecision controlled_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q);

/// CSV rows (mode, node, kind, control, destination_mode, value); node is 1-based.
void write_decisions_csv(std::ostream& out, const Grid& grid, const std::vector<NodeDecision>& decisions);

}  // namespace hybridsl
