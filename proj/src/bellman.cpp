#include "hybridsl/bellman.hpp"

#include "hybridsl/format.hpp"
#include "hybridsl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hybridsl {

SchemeParams SchemeParams::make(double dt, double lambda, int control_samples) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("discount must be positive");
  if (control_samples < 1) throw std::invalid_argument("control samples must be >= 1");
  return {dt, std::exp(-lambda * dt), control_samples};
}

const char* to_string(Branch kind) {
  switch (kind) {
    case Branch::continuous: return "continuous";
    case Branch::autonomous_jump: return "autonomous";
    case Branch::controlled_jump: return "controlled";
  }
  return "?";
}

namespace {

Stencil shifted(Stencil s, std::size_t base) {
  for (int j = 0; j < s.count; ++j) s.node[static_cast<std::size_t>(j)] += base;
  return s;
}

Point step_foot(const HybridProblem& p, const Point& x, int q, double a, double dt) {
  const Point f = p.dynamics(x, q, a);
  Point foot = x;
  for (int k = 0; k < x.dim; ++k) {
    if (!std::isfinite(f[k])) throw std::domain_error("non-finite dynamics value");
    foot[k] = x[k] + dt * f[k];
  }
  return foot;
}

}  // namespace

std::vector<HybridState> controlled_destinations(const HybridProblem& p, const Point& x, int q) {
  std::vector<HybridState> dests = p.destinations ? p.destinations(x, q) : std::vector<HybridState>{};
  std::erase_if(dests, [q](const HybridState& s) { return s.mode == q; });
  std::stable_sort(dests.begin(), dests.end(),
                   [](const HybridState& a, const HybridState& b) { return a.mode < b.mode; });
  return dests;
}

BellmanOperator::BellmanOperator(const HybridProblem& problem, const Grid& grid, const SchemeParams& params)
    : problem_(&problem), grid_(&grid), params_(params) {
  if (problem.dim != grid.dim() || problem.modes != grid.modes())
    throw std::invalid_argument("problem and grid disagree on dimension or modes");
  if (!(params.discount_factor > 0.0 && params.discount_factor < 1.0))
    throw std::invalid_argument("discount factor must lie in (0, 1)");
  controls_ = problem.controls.sample(params.control_samples);
  const std::size_t total = grid.size();
  const std::size_t nc = controls_.size();
  const double penalty = problem.boundary_penalty.value_or(0.0);
  kind_.assign(total, NodeKind::plain);
  flow_.resize(total * nc);
  jump_begin_.assign(total + 1, 0);

  for (int q = 1; q <= grid.modes(); ++q) {
    const std::size_t base = grid.offset(0, q);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const std::size_t flat = base + i;
      const Point x = grid.node(i);
      for (std::size_t k = 0; k < nc; ++k) {
        const double a = controls_[k];
        const auto [foot, clamped] = grid.clamp(step_foot(problem, x, q, a, params.dt));
        Candidate& c = flow_[flat * nc + k];
        const double l = problem.running_cost(x, q, a);
        if (!std::isfinite(l)) throw std::domain_error("non-finite running cost");
        c.cost = params.dt * l;
        c.stencil = shifted(grid.stencil(foot), base);
        c.penalty = clamped ? penalty : 0.0;
        max_running_cost_ = std::max(max_running_cost_, l);
        min_running_cost_ = std::min(min_running_cost_, l);
        any_clamped_ = any_clamped_ || clamped;
      }

      jump_begin_[flat] = jumps_.size();
      if (problem.in_autonomous_set(x, q)) {
        kind_[flat] = NodeKind::autonomous;
        for (int w = 0; w < static_cast<int>(problem.jump_controls.size()); ++w) {
          const HybridState y = problem.transition(x, q, w);
          if (y.mode < 1 || y.mode > grid.modes() || !grid.contains(y.x))
            throw std::domain_error("autonomous jump leaves the computational domain");
          Candidate c;
          c.stencil = shifted(grid.stencil(y.x), grid.offset(0, y.mode));
          c.cost = problem.autonomous_cost ? problem.autonomous_cost(x, q, w) : 0.0;
          c.mode = y.mode;
          c.label = w;
          max_jump_cost_ = std::max(max_jump_cost_, c.cost);
          jumps_.push_back(c);
        }
      } else if (problem.in_controlled_set(x, q)) {
        kind_[flat] = NodeKind::controlled;
        const auto dests = controlled_destinations(problem, x, q);
        for (std::size_t d = 0; d < dests.size(); ++d) {
          const HybridState& y = dests[d];
          if (y.mode < 1 || y.mode > grid.modes() || !grid.contains(y.x))
            throw std::domain_error("controlled jump leaves the computational domain");
          Candidate c;
          c.stencil = shifted(grid.stencil(y.x), grid.offset(0, y.mode));
          c.cost = problem.controlled_cost ? problem.controlled_cost(x, q, y.x, y.mode) : 0.0;
          c.mode = y.mode;
          c.label = static_cast<int>(d);
          max_jump_cost_ = std::max(max_jump_cost_, c.cost);
          jumps_.push_back(c);
        }
      }
    }
  }
  jump_begin_[total] = jumps_.size();
}

NodeDecision BellmanOperator::sigma(const ValueField& field, std::size_t flat) const {
  const std::size_t nc = controls_.size();
  const Candidate* c = &flow_[flat * nc];
  NodeDecision best;
  best.kind = Branch::continuous;
  best.value = continuous_value(c[0], field);
  best.control_index = 0;
  for (std::size_t k = 1; k < nc; ++k) {
    const double v = continuous_value(c[k], field);
    if (v < best.value) {
      best.value = v;
      best.control_index = static_cast<int>(k);
    }
  }
  best.control = controls_[static_cast<std::size_t>(best.control_index)];
  best.destination_mode = static_cast<int>(flat / grid_->nodes()) + 1;
  return best;
}

NodeDecision BellmanOperator::autonomous(const ValueField& field, std::size_t flat) const {
  if (kind_[flat] != NodeKind::autonomous) throw std::logic_error("M evaluated outside the autonomous set");
  const std::size_t b = jump_begin_[flat];
  const std::size_t e = jump_begin_[flat + 1];
  if (b == e) throw std::runtime_error("no admissible autonomous jump at node " + std::to_string(flat + 1));
  NodeDecision best;
  best.kind = Branch::autonomous_jump;
  best.control = controls_.front();
  for (std::size_t j = b; j < e; ++j) {
    const double v = jump_value(jumps_[j], field);
    if (j == b || v < best.value) {
      best.value = v;
      best.jump_index = jumps_[j].label;
      best.destination_mode = jumps_[j].mode;
    }
  }
  return best;
}

NodeDecision BellmanOperator::controlled(const ValueField& field, std::size_t flat) const {
  if (kind_[flat] != NodeKind::controlled) throw std::logic_error("N evaluated outside the controlled set");
  const std::size_t b = jump_begin_[flat];
  const std::size_t e = jump_begin_[flat + 1];
  if (b == e) throw std::runtime_error("no controlled jump destination at node " + std::to_string(flat + 1));
  NodeDecision best;
  best.kind = Branch::controlled_jump;
  best.control = controls_.front();
  for (std::size_t j = b; j < e; ++j) {
    const double v = jump_value(jumps_[j], field);
    if (j == b || v < best.value) {
      best.value = v;
      best.jump_index = jumps_[j].label;
      best.destination_mode = jumps_[j].mode;
    }
  }
  return best;
}

NodeDecision BellmanOperator::node(const ValueField& field, std::size_t flat) const {
  switch (kind_[flat]) {
    case NodeKind::autonomous: return autonomous(field, flat);
    case NodeKind::controlled: {
      NodeDecision cont = sigma(field, flat);
      NodeDecision jump = controlled(field, flat);
      return jump.value < cont.value ? jump : cont;
    }
    case NodeKind::plain: break;
  }
  return sigma(field, flat);
}

void BellmanOperator::apply(const ValueField& field, ValueField& out,
                            std::vector<NodeDecision>* decisions) const {
  if (field.size() != size()) throw std::invalid_argument("value field does not match grid");
  out.resize(size());
  if (decisions) decisions->resize(size());
  parallel_for(size(), threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t flat = begin; flat < end; ++flat) {
      const NodeDecision d = node(field, flat);
      out[flat] = d.value;
      if (decisions) (*decisions)[flat] = d;
    }
  });
}

double BellmanOperator::branch_value(const NodeDecision& d, const ValueField& field, std::size_t flat) const {
  if (d.kind == Branch::continuous) {
    const auto k = static_cast<std::size_t>(d.control_index);
    return continuous_value(flow_[flat * controls_.size() + k], field);
  }
  for (std::size_t j = jump_begin_[flat]; j < jump_begin_[flat + 1]; ++j)
    if (jumps_[j].label == d.jump_index) return jump_value(jumps_[j], field);
  throw std::logic_error("decision refers to a jump that does not exist at this node");
}

void BellmanOperator::apply_frozen(const std::vector<NodeDecision>& decisions, const ValueField& field,
                                   ValueField& out) const {
  if (decisions.size() != size() || field.size() != size())
    throw std::invalid_argument("frozen sweep: size mismatch");
  out.resize(size());
  parallel_for(size(), threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t flat = begin; flat < end; ++flat) out[flat] = branch_value(decisions[flat], field, flat);
  });
}

SweepResult bellman_apply(const BellmanOperator& op, const ValueField& field) {
  SweepResult r;
  op.apply(field, r.field, &r.decisions);
  return r;
}

double qvi_residual(const BellmanOperator& op, const ValueField& field) {
  ValueField next;
  op.apply(field, next, nullptr);
  double r = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j) r = std::max(r, std::abs(next[j] - field[j]));
  return r;
}

NodeDecision sigma_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q) {
  const HybridProblem& p = op.problem();
  const Grid& g = op.grid();
  const SchemeParams& params = op.params();
  const double penalty = p.boundary_penalty.value_or(0.0);
  const std::size_t base = g.offset(0, q);
  NodeDecision best;
  best.kind = Branch::continuous;
  best.destination_mode = q;
  const auto& controls = op.controls();
  for (std::size_t k = 0; k < controls.size(); ++k) {
    const double a = controls[k];
    const auto [foot, clamped] = g.clamp(step_foot(p, x, q, a, params.dt));
    const double cost = params.dt * p.running_cost(x, q, a);
    const double v =
        cost + params.discount_factor * (g.stencil(foot).apply(field.data(), base) + (clamped ? penalty : 0.0));
    if (k == 0 || v < best.value) {
      best.value = v;
      best.control_index = static_cast<int>(k);
      best.control = a;
    }
  }
  return best;
}

NodeDecision autonomous_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q) {
  const HybridProblem& p = op.problem();
  if (p.jump_controls.empty()) throw std::runtime_error("no admissible autonomous jump");
  NodeDecision best;
  best.kind = Branch::autonomous_jump;
  for (int w = 0; w < static_cast<int>(p.jump_controls.size()); ++w) {
    const HybridState y = p.transition(x, q, w);
    const double c = p.autonomous_cost ? p.autonomous_cost(x, q, w) : 0.0;
    const double v = op.grid().interpolate(field, y.x, y.mode) + c;
    if (w == 0 || v < best.value) {
      best.value = v;
      best.jump_index = w;
      best.destination_mode = y.mode;
    }
  }
  return best;
}

NodeDecision controlled_at(const BellmanOperator& op, const ValueField& field, const Point& x, int q) {
  const HybridProblem& p = op.problem();
  const auto dests = controlled_destinations(p, x, q);
  if (dests.empty()) throw std::runtime_error("no controlled jump destination");
  NodeDecision best;
  best.kind = Branch::controlled_jump;
  for (std::size_t d = 0; d < dests.size(); ++d) {
    const HybridState& y = dests[d];
    const double c = p.controlled_cost ? p.controlled_cost(x, q, y.x, y.mode) : 0.0;
    const double v = op.grid().interpolate(field, y.x, y.mode) + c;
    if (d == 0 || v < best.value) {
      best.value = v;
      best.jump_index = static_cast<int>(d);
      best.destination_mode = y.mode;
    }
  }
  return best;
}

void write_decisions_csv(std::ostream& out, const Grid& grid, const std::vector<NodeDecision>& decisions) {
  out << "mode,node,kind,control,destination_mode,value\n";
  for (std::size_t flat = 0; flat < decisions.size(); ++flat) {
    const NodeDecision& d = decisions[flat];
    const std::size_t q = flat / grid.nodes() + 1;
    const std::size_t i = flat % grid.nodes() + 1;
    out << q << ',' << i << ',' << to_string(d.kind) << ',' << fmt_double(d.control) << ','
        << d.destination_mode << ',' << fmt_double(d.value) << '\n';
  }
}

}  // namespace hybridsl
