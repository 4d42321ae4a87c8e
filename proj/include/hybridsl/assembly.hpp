#pragma once

#include "hybridsl/bellman.hpp"
#include "hybridsl/grid.hpp"
#include "hybridsl/hybrid_model.hpp"
#include "hybridsl/linalg.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace hybridsl {

/// Feedback control alpha and switching strategy s, both in flat layout.
/// s[(k-1)n+i] = l means that at node i the mode k commutes to l.
struct Policy {
  std::vector<double> control;
  std::vector<int> mode;

  bool operator==(const Policy&) const = default;
};

/// B = -I + D(s) + e^{-lambda dt} E(alpha, s) and the cost vector c, so that
/// B w = c is the frozen-policy scheme.
struct AssembledSystem {
  SparseMatrix B;
  std::vector<double> c;
};

class CourantError : public std::runtime_error {
 public:
  CourantError(const std::string& what, std::size_t row, double courant)
      : std::runtime_error(what), row_(row), courant_(courant) {}
  std::size_t row() const { return row_; }  // 1-based flat index
  double courant() const { return courant_; }

 private:
  std::size_t row_;
  double courant_;
};

class InvalidPolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation parts of the switching strategy: (D_A, D_C).
std::pair<SparseMatrix, SparseMatrix> assemble_D(const HybridProblem& problem, const Grid& grid,
                                                 const Policy& policy);

/// Block-diagonal two-point transport matrix (d = 1 only); switch rows are zero.
SparseMatrix assemble_E(const HybridProblem& problem, const Grid& grid, const SchemeParams& params,
                        const Policy& policy);

std::vector<double> assemble_c(const HybridProblem& problem, const Grid& grid, const SchemeParams& params,
                               const Policy& policy);

/// Throws InvalidPolicyError when the switch rows form a cycle, which makes B singular.
void check_switch_cycles(const Grid& grid, const Policy& policy);

AssembledSystem assemble_B(const HybridProblem& problem, const Grid& grid, const SchemeParams& params,
                           const Policy& policy);

/// The node-wise argmin of the scheme, as a policy.
Policy policy_from_decisions(const Grid& grid, const std::vector<NodeDecision>& decisions);
Policy greedy_policy(const BellmanOperator& op, const ValueField& field);

}  // namespace hybridsl
