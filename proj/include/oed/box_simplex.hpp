// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "oed/errors.hpp"

namespace oed {

// Box-constrained budget set F = {x : e'x = budget, lower <= x <= upper}.
struct BoxSimplex {
  double budget = 0.0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }

  // Bound-activity tolerance used by exchange-pair selection: entries within
  // this distance of a bound count as pinned there.
  double activity_tol() const;

  // True when no point satisfies both the bounds and the budget.
  bool empty() const { return lower.sum() > budget || upper.sum() < budget; }

  // Checks matching sizes and 0 <= lower <= upper; throws
  // std::invalid_argument on violation. Emptiness is a separate query.
  void validate() const;
};

// Budget within tol and bounds within tol, elementwise.
bool is_feasible(const BoxSimplex& set, const Eigen::VectorXd& x, double tol);

// Euclidean projection onto the set, computed by monotone bisection on the
// shift lambda in clip(y - lambda, lower, upper). Throws EmptySetError when
// the set is empty. Idempotent to ~1e-12.
Eigen::VectorXd project(const BoxSimplex& set, const Eigen::VectorXd& y);

struct LinearMinResult {
  Eigen::VectorXd x;   // a minimizing vertex
  double value = 0.0;  // g'x at that vertex
};

// Minimizes g'x over the set by greedy fill: start at the lower bounds and
// spend the remaining budget on coordinates in increasing order of g (ties by
// lower index). Throws EmptySetError when the set is empty.
LinearMinResult linear_min(const BoxSimplex& set, const Eigen::VectorXd& g);

struct ExchangePair {
  int gain = -1;  // coordinate whose weight should increase: smallest
                  // gradient entry among x_i < upper_i - activity_tol
  int drop = -1;  // coordinate whose weight should decrease: largest
                  // gradient entry among x_i > lower_i + activity_tol
  bool at_optimum = false;  // g[gain] >= g[drop]: no strict descent exchange
};

// Steepest feasible exchange pair at x for gradient g; ties break toward the
// lower index on both sides. Throws DegenerateSetError when either candidate
// set is empty (the feasible set is a single point).
ExchangePair select_pair(const BoxSimplex& set, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& g);

}  // namespace oed
