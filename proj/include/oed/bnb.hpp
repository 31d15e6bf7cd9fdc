// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "oed/pn.hpp"
#include "oed/problem.hpp"
#include "oed/vem.hpp"

namespace oed {

enum class NodeSolver { ProjectedNewton, VertexExchange };

const char* to_string(NodeSolver solver);

// Accepts "pn" and "vem" (case-insensitive); throws ParseError otherwise.
NodeSolver node_solver_from_string(std::string_view text);

struct BnbConfig {
  double time_limit = 7200.0;  // seconds, measured from the root relaxation
  double abstol = 1e-2;        // absolute incumbent/bound gap target
  double reltol = 1e-6;        // relative gap target
  NodeSolver node_solver = NodeSolver::ProjectedNewton;
  double node_tol = 1e-6;         // relaxation solver tolerance
  double integrality_tol = 1e-6;  // fractionality threshold for branching
  long node_limit = std::numeric_limits<long>::max();
  int threads = 1;  // > 1 evaluates the two children of a branch in parallel
  PnParams pn_params{};         // node_tol overrides pn_params.tol
  long vem_max_iter = 100000;

  // Throws std::invalid_argument on nonpositive tolerances/limits.
  void validate() const;
};

// A subproblem: the root box [0, caps] narrowed by branching decisions.
struct Node {
  Eigen::VectorXi lower;
  Eigen::VectorXi upper;
  Eigen::VectorXd relax_x;  // minimizer of the relaxation over the node box
  double bound = std::numeric_limits<double>::infinity();  // f(relax_x)
  int depth = 0;
  long id = 0;
};

struct Incumbent {
  Eigen::VectorXi x;
  double f = std::numeric_limits<double>::infinity();
};

// Branching decision at a fractional relaxation point: index is the most
// fractional coordinate (ties toward the lower index), the left child caps it
// at floor(value), the right child raises its lower bound to ceil(value).
struct BranchDecision {
  int index = -1;
  Eigen::VectorXi left_lower, left_upper;
  Eigen::VectorXi right_lower, right_upper;
};

// Returns std::nullopt when every coordinate of node.relax_x is within
// integrality_tol of an integer.
std::optional<BranchDecision> branch(const Node& node, double integrality_tol);

// Feasible integer design from a set of n linearly independent rows: cap the
// chosen rows, shed surplus by repeatedly decrementing the largest entry
// (ties toward the lower index), then fill any shortfall across the remaining
// rows in index order. The chosen rows keep weight >= 1, so the information
// matrix is nonsingular. Throws InfeasibleError when caps.sum() < budget.
Incumbent rounding_from_rows(const DesignProblem& problem, Criterion criterion,
                             const std::vector<int>& rows);

// rounding_from_rows with the row set chosen by column-pivoted QR of A'.
// rng_seed is accepted for interface stability; the heuristic is
// deterministic and does not consume randomness.
Incumbent rounding_heuristic(const DesignProblem& problem, Criterion criterion,
                             unsigned long rng_seed = 0);

// Exhaustive minimum over all feasible integer designs, for cross-checking
// small instances. Designs whose information matrix is singular are skipped;
// std::nullopt means no feasible design has a nonsingular one. Throws
// TooLargeError when more than max_designs feasible designs exist.
std::optional<Incumbent> enumerate_exact(const DesignProblem& problem,
                                         Criterion criterion,
                                         long max_designs = 1000000);

enum class SolveStatus { Optimal, TimeLimit, NodeLimit, Infeasible };
enum class Termination {
  TreeExhausted,  // queue empty: gap closed by convention
  AbsGap,         // |f_incumbent - best_bound| <= abstol
  RelGap,         // relative gap <= reltol
  TimeLimit,
  NodeLimit,
  Infeasible,     // caps.sum() < budget
};

const char* to_string(SolveStatus status);
const char* to_string(Termination termination);

struct SolveReport {
  SolveStatus status = SolveStatus::Optimal;
  Termination termination = Termination::TreeExhausted;
  Criterion criterion = Criterion::DOptimal;
  NodeSolver node_solver = NodeSolver::ProjectedNewton;

  int m = 0, n = 0, budget = 0;
  // Instance identity, filled by the caller that created the problem.
  std::string kind = "file";
  unsigned long seed = 0;
  std::string fingerprint;

  Eigen::VectorXi incumbent;  // empty when status == Infeasible
  double f_incumbent = std::numeric_limits<double>::infinity();
  double best_bound = -std::numeric_limits<double>::infinity();
  double abs_gap = std::numeric_limits<double>::infinity();
  double rel_gap = std::numeric_limits<double>::infinity();
  bool rel_gap_guard_fired = false;  // denominator floor 1e-10 was active

  long nodes_evaluated = 0;  // relaxations solved (the nodes/sec unit)
  long nodes_pushed = 0;
  long nodes_popped = 0;
  long nodes_remaining = 0;
  long nodes_prepruned = 0;   // children discarded on budget bounds alone
  long domain_prunes = 0;     // children whose relaxation left the domain
  double wall_seconds = 0.0;
  double nodes_per_second = 0.0;

  long grad_evals = 0;    // across all relaxation solves
  long solver_iters = 0;  // outer iterations (PN) or exchanges (VEM)
  long qp_iters = 0;      // subproblem exchanges (PN only)

  BnbConfig config{};
};

// Best-first branch and bound: incumbent from the rounding heuristic, node
// bounds from the chosen relaxation solver warm-started at the projection of
// the parent minimizer, most-fractional branching, and pruning of any node
// whose bound exceeds f_incumbent + abstol/10. Children violating the budget
// on bounds alone are discarded without a relaxation solve. The clock starts
// at the root relaxation. Single-threaded runs are deterministic.
SolveReport solve(const DesignProblem& problem, Criterion criterion,
                  const BnbConfig& config = {});

}  // namespace oed
