// SPDX-License-Identifier: Apache-2.0
#include "oed/pn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "domain_start.hpp"
#include "oed/qp.hpp"

namespace oed {
namespace {

// Denominator of h_fn: (1 - 2 tau)(1 - tau)^2 - tau^2 = 1 - 4t + 4t^2 - 2t^3.
double h_denominator(double tau) {
  return 1.0 + tau * (-4.0 + tau * (4.0 - 2.0 * tau));
}

}  // namespace

double h_domain_sup() {
  // Smallest positive root of the denominator; it is positive at 0 and
  // negative at 1/2, so plain bisection applies.
  static const double sup = [] {
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      double mid = 0.5 * (lo + hi);
      (h_denominator(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return sup;
}

double h_fn(double tau) {
  if (!(tau >= 0.0) || tau >= h_domain_sup())
    throw DomainError("threshold function argument outside [0, sup)");
  double num = tau * (1.0 + tau * (-2.0 + 2.0 * tau));
  return num / h_denominator(tau);
}

double h_inv(double y) {
  if (!(y >= 0.0))
    throw DomainError("threshold function inverse needs a nonnegative value");
  if (y == 0.0) return 0.0;
  const double sup = h_domain_sup();

  // h is strictly increasing and blows up at sup; bracket then bisect.
  double lo = 0.0;
  double hi = 0.5 * sup;
  for (int it = 0; h_fn(hi) < y; ++it) {
    // 50 halvings toward sup reach h of order 1e14; larger targets would
    // need arguments indistinguishable from sup in double precision.
    if (it >= 50)
      throw DomainError("threshold function inverse target is unreachable");
    lo = hi;
    hi = sup - 0.5 * (sup - hi);
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h_fn(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void PnParams::validate() const {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("beta must lie in (0, 1/2)");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("sigma must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(c > 1.0)) throw std::invalid_argument("c must exceed 1");
  if (!(c1 > 1.0)) throw std::invalid_argument("c1 must exceed 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  const double lhs1 = 1.0 / (c * (1.0 - beta)) +
                      beta / ((1.0 - 2.0 * beta) * (1.0 - beta) * (1.0 - beta));
  if (!(lhs1 <= sigma))
    throw std::invalid_argument(
        "parameters violate 1/(c(1-beta)) + beta/((1-2beta)(1-beta)^2) <= sigma");
  const double lhs2 = 1.0 / c + 1.0 / (1.0 - 2.0 * beta);
  if (!(lhs2 <= 2.0))
    throw std::invalid_argument("parameters violate 1/c + 1/(1-2beta) <= 2");
}

PnResult solve_relaxation(const DesignProblem& problem, Criterion criterion,
                          const BoxSimplex& set, const Eigen::VectorXd& x0,
                          const PnParams& params,
                          const IterateObserver& observer) {
  params.validate();
  set.validate();
  if (set.empty())
    throw InfeasibleError("relaxation is infeasible: empty budget set");

  auto [x, state] = detail::feasible_domain_start(problem, criterion, set, x0);
  PnResult res;
  res.stats.grad_evals = 1;
  if (observer) observer(x, state.f_val);

  const double h_inv_beta = h_inv(params.beta);
  double lambda = params.beta / params.sigma;
  double eps = std::min(params.beta / params.c, params.c1 * h_inv_beta);

  bool converged = false;
  while (res.stats.outer_iters < params.max_outer) {
    ExchangePair pair;
    try {
      pair = select_pair(set, x, state.grad);
    } catch (const DegenerateSetError&) {
      converged = true;  // single-point feasible set
      break;
    }
    if (pair.at_optimum ||
        state.grad[pair.drop] - state.grad[pair.gain] <=
            params.tol * std::max(1.0, std::abs(state.grad[pair.gain]))) {
      converged = true;
      break;
    }

    Eigen::MatrixXd H = hessian(state);
    ++res.stats.hessian_evals;
    QpModel model(state.grad, H, x, state.f_val);
    QpResult qp = solve_qp(model, set, x, eps);
    res.stats.qp_iters += qp.iters;

    Eigen::VectorXd d = qp.z - x;
    const double gamma = local_norm(H, d);

    const bool trigger = eps + gamma <= h_inv_beta;
    // gamma <= eps means the subproblem tolerance dominates the step; the
    // damped formula is undefined there, so treat it as the full-step phase.
    const bool full = trigger || lambda <= params.beta || gamma <= eps;
    double eta;
    if (full) {
      if (trigger && res.stats.first_full_trigger < 0)
        res.stats.first_full_trigger = res.stats.outer_iters;
      lambda *= params.sigma;
      eps *= params.sigma;
      eta = 1.0;
    } else {
      eta = params.delta * (gamma * gamma - eps * eps) /
            (gamma * gamma * gamma + gamma * gamma - eps * eps * gamma);
      eta = std::clamp(eta, 0.0, 1.0);
    }

    if (res.stats.first_full_trigger >= 0 &&
        res.stats.outer_iters > res.stats.first_full_trigger) {
      ++res.stats.steps_after_trigger;
      if (full) ++res.stats.full_after_trigger;
    }

    x += eta * d;
    state = build_state(problem, criterion, x);
    ++res.stats.grad_evals;
    ++res.stats.outer_iters;
    full ? ++res.stats.full_steps : ++res.stats.damped_steps;
    if (observer) observer(x, state.f_val);
  }

  res.stats.converged = converged;
  res.stats.final_eps = eps;
  res.stats.final_lambda = lambda;
  res.x = std::move(x);
  res.f = state.f_val;
  return res;
}

}  // namespace oed
