// SPDX-License-Identifier: Apache-2.0
#include "oed/bnb.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <future>
#include <queue>
#include <stdexcept>
#include <utility>

#include "oed/box_simplex.hpp"

namespace oed {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelGapFloor = 1e-10;

// Best-first order: smallest bound, then deepest, then oldest.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

BoxSimplex node_box(const Node& node, int budget) {
  return BoxSimplex{static_cast<double>(budget), node.lower.cast<double>(),
                    node.upper.cast<double>()};
}

double relative_gap(double f_inc, double bound, bool* guard_fired) {
  double denom = std::min(std::abs(f_inc), std::abs(bound));
  if (denom < kRelGapFloor) {
    denom = kRelGapFloor;
    if (guard_fired) *guard_fired = true;
  }
  return std::abs(f_inc - bound) / denom;
}

struct NodeSolveOutcome {
  bool in_domain = false;
  Eigen::VectorXd x;
  double f = kInf;
  long grad_evals = 0;
  long solver_iters = 0;
  long qp_iters = 0;
};

NodeSolveOutcome solve_node(const DesignProblem& problem, Criterion criterion,
                            const BnbConfig& config, const BoxSimplex& box,
                            const Eigen::VectorXd& warm) {
  NodeSolveOutcome out;
  try {
    if (config.node_solver == NodeSolver::ProjectedNewton) {
      PnParams params = config.pn_params;
      params.tol = config.node_tol;
      PnResult r = solve_relaxation(problem, criterion, box, warm, params);
      out.in_domain = true;
      out.x = std::move(r.x);
      out.f = r.f;
      out.grad_evals = r.stats.grad_evals;
      out.solver_iters = r.stats.outer_iters;
      out.qp_iters = r.stats.qp_iters;
    } else {
      VemResult r = solve_vem(problem, criterion, box, warm, config.node_tol,
                              config.vem_max_iter);
      out.in_domain = true;
      out.x = std::move(r.x);
      out.f = r.f;
      out.grad_evals = r.grad_evals;
      out.solver_iters = r.iters;
    }
  } catch (const DomainError&) {
    // No point of the node's box has a nonsingular information matrix; the
    // node cannot contain a usable design.
  }
  return out;
}

}  // namespace

const char* to_string(NodeSolver solver) {
  return solver == NodeSolver::ProjectedNewton ? "pn" : "vem";
}

NodeSolver node_solver_from_string(std::string_view text) {
  std::string t(text);
  for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "pn") return NodeSolver::ProjectedNewton;
  if (t == "vem") return NodeSolver::VertexExchange;
  throw ParseError("unknown node solver '" + std::string(text) +
                   "' (expected pn or vem)");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::TimeLimit: return "TimeLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::TreeExhausted: return "tree_exhausted";
    case Termination::AbsGap: return "abs_gap";
    case Termination::RelGap: return "rel_gap";
    case Termination::TimeLimit: return "time_limit";
    case Termination::NodeLimit: return "node_limit";
    case Termination::Infeasible: return "infeasible";
  }
  return "unknown";
}

void BnbConfig::validate() const {
  if (!(time_limit >= 0.0))
    throw std::invalid_argument("time_limit must be nonnegative");
  if (!(abstol > 0.0)) throw std::invalid_argument("abstol must be positive");
  if (!(reltol > 0.0)) throw std::invalid_argument("reltol must be positive");
  if (!(node_tol > 0.0))
    throw std::invalid_argument("node_tol must be positive");
  if (!(integrality_tol > 0.0 && integrality_tol < 0.5))
    throw std::invalid_argument("integrality_tol must lie in (0, 1/2)");
  if (node_limit < 1) throw std::invalid_argument("node_limit must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (vem_max_iter < 1)
    throw std::invalid_argument("vem_max_iter must be >= 1");
  PnParams p = pn_params;
  p.tol = node_tol;
  p.validate();
}

std::optional<BranchDecision> branch(const Node& node, double integrality_tol) {
  const Eigen::Index m = node.relax_x.size();
  int index = -1;
  double best_frac = integrality_tol;
  for (Eigen::Index i = 0; i < m; ++i) {
    double frac = node.relax_x[i] - std::floor(node.relax_x[i]);
    double dist = std::min(frac, 1.0 - frac);  // distance to nearest integer
    if (dist > best_frac) {
      best_frac = dist;
      index = static_cast<int>(i);
    }
  }
  if (index < 0) return std::nullopt;

  BranchDecision d;
  d.index = index;
  d.left_lower = node.lower;
  d.left_upper = node.upper;
  d.right_lower = node.lower;
  d.right_upper = node.upper;
  const double v = node.relax_x[index];
  d.left_upper[index] = static_cast<int>(std::floor(v));
  d.right_lower[index] = static_cast<int>(std::ceil(v));
  return d;
}

Incumbent rounding_from_rows(const DesignProblem& problem, Criterion criterion,
                             const std::vector<int>& rows) {
  const int m = problem.num_experiments();
  const long budget = problem.budget;
  if (problem.caps.cast<long>().sum() < budget)
    throw InfeasibleError("caps sum below the budget: no integer design");

  Eigen::VectorXi x = Eigen::VectorXi::Zero(m);
  std::vector<char> used(m, 0);
  for (int j : rows) {
    x[j] = problem.caps[j];
    used[j] = 1;
  }
  long sum = x.cast<long>().sum();

  // Shed surplus by decrementing the largest chosen entry (ties toward the
  // lower index); with budget >= n every chosen row keeps weight >= 1, so
  // the information matrix stays nonsingular.
  while (sum > budget) {
    int jmax = -1;
    for (int j : rows)
      if (jmax < 0 || x[j] > x[jmax]) jmax = j;
    --x[jmax];
    --sum;
  }
  // Fill any shortfall across the remaining rows in index order.
  for (int j = 0; j < m && sum < budget; ++j) {
    if (used[j]) continue;
    int add = static_cast<int>(std::min<long>(budget - sum, problem.caps[j]));
    x[j] = add;
    sum += add;
  }
  if (sum != budget)
    throw InfeasibleError("caps sum below the budget: no integer design");

  Incumbent inc;
  inc.x = x;
  inc.f = build_state(problem, criterion, x.cast<double>()).f_val;
  return inc;
}

Incumbent rounding_heuristic(const DesignProblem& problem, Criterion criterion,
                             unsigned long /*rng_seed*/) {
  const int n = problem.num_params();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.A.transpose());
  if (qr.rank() < n)
    throw RankError("design matrix is column-rank-deficient");
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> rows(perm.data(), perm.data() + n);
  std::sort(rows.begin(), rows.end());
  return rounding_from_rows(problem, criterion, rows);
}

std::optional<Incumbent> enumerate_exact(const DesignProblem& problem,
                                         Criterion criterion,
                                         long max_designs) {
  const int m = problem.num_experiments();
  Incumbent best;
  long count = 0;
  Eigen::VectorXi x = Eigen::VectorXi::Zero(m);

  // Capacity of the coordinate suffix starting at i, for pruning prefixes
  // that cannot reach the budget.
  std::vector<long> suffix_caps(m + 1, 0);
  for (int i = m - 1; i >= 0; --i)
    suffix_caps[i] = suffix_caps[i + 1] + problem.caps[i];

  // Depth-first over coordinates in lexicographic order, so ties keep the
  // lexicographically smallest optimal design.
  auto visit = [&](auto&& self, int i, long rem) -> void {
    if (rem > suffix_caps[i]) return;
    if (i == m - 1) {
      if (rem > problem.caps[i]) return;
      x[i] = static_cast<int>(rem);
      if (++count > max_designs)
        throw TooLargeError("feasible design count exceeds the enumeration cap");
      try {
        double f = build_state(problem, criterion, x.cast<double>()).f_val;
        if (f < best.f) {
          best.f = f;
          best.x = x;
        }
      } catch (const DomainError&) {
      }
      x[i] = 0;
      return;
    }
    long hi = std::min<long>(problem.caps[i], rem);
    for (long v = 0; v <= hi; ++v) {
      x[i] = static_cast<int>(v);
      self(self, i + 1, rem - v);
    }
    x[i] = 0;
  };
  visit(visit, 0, problem.budget);

  if (best.x.size() == 0) return std::nullopt;
  return best;
}

SolveReport solve(const DesignProblem& problem, Criterion criterion,
                  const BnbConfig& config) {
  config.validate();

  SolveReport rep;
  rep.criterion = criterion;
  rep.node_solver = config.node_solver;
  rep.m = problem.num_experiments();
  rep.n = problem.num_params();
  rep.budget = problem.budget;
  rep.config = config;

  // Infeasibility is an answer, not an error: report it before the general
  // well-formedness checks get a chance to throw for the same condition.
  if (problem.caps.size() == problem.A.rows() &&
      problem.caps.cast<long>().sum() < problem.budget) {
    rep.status = SolveStatus::Infeasible;
    rep.termination = Termination::Infeasible;
    return rep;
  }
  problem.validate();

  Incumbent inc = rounding_heuristic(problem, criterion);

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  long next_id = 0;

  auto accumulate = [&](const NodeSolveOutcome& out) {
    ++rep.nodes_evaluated;
    rep.grad_evals += out.grad_evals;
    rep.solver_iters += out.solver_iters;
    rep.qp_iters += out.qp_iters;
    if (!out.in_domain) ++rep.domain_prunes;
  };

  {
    Node root;
    root.lower = Eigen::VectorXi::Zero(rep.m);
    root.upper = problem.caps;
    root.id = next_id++;
    NodeSolveOutcome out = solve_node(problem, criterion, config,
                                      node_box(root, problem.budget),
                                      inc.x.cast<double>());
    accumulate(out);
    if (out.in_domain) {
      root.relax_x = std::move(out.x);
      root.bound = out.f;
      queue.push(std::move(root));
      ++rep.nodes_pushed;
    }
  }

  std::optional<Termination> stop;
  double bound_at_stop = -kInf;

  while (!stop) {
    if (queue.empty()) {
      stop = Termination::TreeExhausted;
      bound_at_stop = inc.f;  // gap closed by convention
      break;
    }
    const double best_bound = queue.top().bound;
    if (std::abs(inc.f - best_bound) <= config.abstol) {
      stop = Termination::AbsGap;
      bound_at_stop = best_bound;
      break;
    }
    if (relative_gap(inc.f, best_bound, &rep.rel_gap_guard_fired) <=
        config.reltol) {
      stop = Termination::RelGap;
      bound_at_stop = best_bound;
      break;
    }
    if (elapsed() > config.time_limit) {
      stop = Termination::TimeLimit;
      bound_at_stop = best_bound;
      break;
    }
    if (rep.nodes_evaluated >= config.node_limit) {
      stop = Termination::NodeLimit;
      bound_at_stop = best_bound;
      break;
    }

    Node node = queue.top();
    queue.pop();
    ++rep.nodes_popped;

    std::optional<BranchDecision> decision =
        branch(node, config.integrality_tol);
    if (!decision) {
      // Integral relaxation minimizer: the node is solved outright; keep it
      // if it beats the incumbent (f re-evaluated exactly at the rounding).
      Eigen::VectorXi xi(rep.m);
      for (int i = 0; i < rep.m; ++i)
        xi[i] = static_cast<int>(std::llround(node.relax_x[i]));
      try {
        double f = build_state(problem, criterion, xi.cast<double>()).f_val;
        if (f < inc.f) {
          inc.x = xi;
          inc.f = f;
        }
      } catch (const DomainError&) {
      }
      continue;
    }

    // Bound-based pruning with a slack well under the optimality tolerance,
    // so near-tie nodes are explored rather than lost to solver tolerance.
    if (node.bound > inc.f + config.abstol / 10.0) continue;

    struct ChildBox {
      Eigen::VectorXi lower, upper;
    };
    std::vector<ChildBox> kept;
    for (int side = 0; side < 2; ++side) {
      ChildBox child;
      child.lower = side == 0 ? decision->left_lower : decision->right_lower;
      child.upper = side == 0 ? decision->left_upper : decision->right_upper;
      if (child.lower.cast<long>().sum() > problem.budget ||
          child.upper.cast<long>().sum() < problem.budget) {
        ++rep.nodes_prepruned;  // budget infeasible on bounds alone
        continue;
      }
      kept.push_back(std::move(child));
    }

    std::vector<NodeSolveOutcome> outcomes(kept.size());
    auto eval_child = [&](size_t idx) {
      BoxSimplex box{static_cast<double>(problem.budget),
                     kept[idx].lower.cast<double>(),
                     kept[idx].upper.cast<double>()};
      Eigen::VectorXd warm = project(box, node.relax_x);
      return solve_node(problem, criterion, config, box, warm);
    };
    if (config.threads > 1 && kept.size() == 2) {
      auto right = std::async(std::launch::async, eval_child, 1);
      outcomes[0] = eval_child(0);
      outcomes[1] = right.get();
    } else {
      for (size_t idx = 0; idx < kept.size(); ++idx)
        outcomes[idx] = eval_child(idx);
    }

    for (size_t idx = 0; idx < kept.size(); ++idx) {
      accumulate(outcomes[idx]);
      if (!outcomes[idx].in_domain) continue;
      Node child;
      child.lower = std::move(kept[idx].lower);
      child.upper = std::move(kept[idx].upper);
      child.relax_x = std::move(outcomes[idx].x);
      child.bound = outcomes[idx].f;
      child.depth = node.depth + 1;
      child.id = next_id++;
      queue.push(std::move(child));
      ++rep.nodes_pushed;
    }
  }

  rep.termination = *stop;
  switch (rep.termination) {
    case Termination::TimeLimit:
      rep.status = SolveStatus::TimeLimit;
      break;
    case Termination::NodeLimit:
      rep.status = SolveStatus::NodeLimit;
      break;
    default:
      rep.status = SolveStatus::Optimal;
      break;
  }

  rep.incumbent = inc.x;
  rep.f_incumbent = inc.f;
  rep.best_bound = bound_at_stop;
  rep.abs_gap = std::abs(inc.f - rep.best_bound);
  rep.rel_gap = relative_gap(inc.f, rep.best_bound, &rep.rel_gap_guard_fired);
  rep.nodes_remaining = static_cast<long>(queue.size());
  rep.wall_seconds = elapsed();
  rep.nodes_per_second =
      static_cast<double>(rep.nodes_evaluated) / std::max(rep.wall_seconds, 1e-9);
  return rep;
}

}  // namespace oed
