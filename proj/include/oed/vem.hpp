// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "oed/box_simplex.hpp"
#include "oed/criteria.hpp"
#include "oed/observer.hpp"

namespace oed {

// Exact minimizer of the one-dimensional slice
//   phi(eta) = f(x + eta (e_gain - e_drop)),  eta in [0, cap],
// for the design criterion, by safeguarded Newton/bisection on phi' using the
// closed-form derivatives of the rank-two update of X(x). Returns 0 when phi
// is nondecreasing at 0 (no strict descent along the exchange) and cap when
// phi' stays negative on the whole interval; interior roots are located to
// within 1e-10. Points where the updated information matrix leaves the
// criterion's domain are treated as being past the minimizer.
double vem_step_size(const DesignProblem& problem, Criterion criterion,
                     const Eigen::VectorXd& x, int gain, int drop, double cap);

struct VemResult {
  Eigen::VectorXd x;
  double f = 0.0;
  long iters = 0;
  long grad_evals = 0;    // = iters + 1
  bool converged = true;  // false when max_iter was exhausted
};

// Minimizes the design criterion over the box-constrained budget set by
// direct pairwise exchanges: each iteration picks the steepest feasible
// exchange pair of the exact gradient and moves by the exact line minimizer.
// Start handling and the termination test match solve_relaxation: stop when
// g[drop] - g[gain] <= tol * max(1, |g[gain]|) or the pair rule proves exact
// optimality.
//
// Throws InfeasibleError when the set is empty and DomainError when no
// feasible point with nonsingular information matrix is found.
VemResult solve_vem(const DesignProblem& problem, Criterion criterion,
                    const BoxSimplex& set, const Eigen::VectorXd& x0,
                    double tol = 1e-6, long max_iter = 100000,
                    const IterateObserver& observer = {});

}  // namespace oed
