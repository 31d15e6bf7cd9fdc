// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "oed/box_simplex.hpp"
#include "oed/criteria.hpp"
#include "oed/observer.hpp"

namespace oed {

// Threshold function of the damped/full phase split:
//   h(tau) = tau (1 - 2 tau + 2 tau^2) / ((1 - 2 tau)(1 - tau)^2 - tau^2).
// Strictly increasing from 0 on [0, h_domain_sup()). Throws DomainError for
// tau outside that interval.
double h_fn(double tau);

// Supremum of h_fn's domain: the smallest positive root of the denominator
// 1 - 4 tau + 4 tau^2 - 2 tau^3 (about 0.3517).
double h_domain_sup();

// Inverse of h_fn on [0, inf), by safeguarded bisection to |h(tau) - y| <=
// 1e-12. Throws DomainError for y < 0.
double h_inv(double y);

struct PnParams {
  double beta = 0.1;    // target local-norm radius of the full-step phase
  double sigma = 0.75;  // shrink factor applied to lambda and eps on full steps
  double delta = 0.95;  // damped-step scaling
  double c = 2.0;       // divides beta in the initial subproblem tolerance
  double c1 = 2.0;      // scales h_inv(beta) in the initial subproblem tolerance
  double tol = 1e-6;    // relative gradient-gap tolerance of the outer loop
  int max_outer = 200;

  // Checks 0 < beta < 1/2, 0 < sigma < 1, 0 < delta <= 1, c > 1, c1 > 1, and
  // the two convergence inequalities
  //   1/(c (1-beta)) + beta/((1-2 beta)(1-beta)^2) <= sigma,
  //   1/c + 1/(1-2 beta) <= 2.
  // Throws std::invalid_argument on violation.
  void validate() const;
};

struct PnStats {
  int outer_iters = 0;
  int full_steps = 0;
  int damped_steps = 0;
  long grad_evals = 0;    // successful state builds, = outer_iters + 1
  long hessian_evals = 0;
  long qp_iters = 0;      // exchange iterations across all subproblem solves
  double final_eps = 0.0;
  double final_lambda = 0.0;
  bool converged = true;  // false when max_outer was exhausted

  // Outer index at which eps + gamma <= h_inv(beta) first held, -1 if never.
  int first_full_trigger = -1;
  // Steps strictly after that trigger, and how many of them were full.
  int steps_after_trigger = 0;
  int full_after_trigger = 0;
};

struct PnResult {
  Eigen::VectorXd x;
  double f = 0.0;
  PnStats stats;
};

// Minimizes the design criterion over the box-constrained budget set by a
// projected Newton method: each outer iteration builds the quadratic model at
// x, solves it over the set to tolerance eps by pairwise exchanges, and takes
// either a full step (when eps + gamma <= h_inv(beta) or lambda <= beta,
// shrinking lambda and eps by sigma) or a damped step
// eta = delta (gamma^2 - eps^2) / (gamma^3 + gamma^2 - eps^2 gamma), where
// gamma is the local norm of the proposed displacement. Starts from
// project(set, x0), blending toward the projected uniform design when the
// start is outside the criterion's domain. Terminates when the exchange pair
// (gain, drop) of the true gradient satisfies
// g[drop] - g[gain] <= tol * max(1, |g[gain]|) or proves exact optimality.
//
// Throws InfeasibleError when the set is empty and DomainError when no
// feasible point with nonsingular information matrix is found.
PnResult solve_relaxation(const DesignProblem& problem, Criterion criterion,
                          const BoxSimplex& set, const Eigen::VectorXd& x0,
                          const PnParams& params = {},
                          const IterateObserver& observer = {});

}  // namespace oed
