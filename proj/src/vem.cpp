// SPDX-License-Identifier: Apache-2.0
#include "oed/vem.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "domain_start.hpp"

namespace oed {
namespace {

constexpr double kPivotRelTol = 1e-12;  // matches the state factorization

struct LineEval {
  bool in_domain = false;
  double dphi = 0.0;   // phi'(eta)
  double d2phi = 0.0;  // phi''(eta)
};

// Derivatives of phi(eta) = f(x + eta (e_gain - e_drop)) from the 2x2 blocks
// p_ab = a'_a X^{-1} a_b and (A-criterion) q_ab = a'_a X^{-2} a_b of the
// exchanged rows, evaluated at X = X0 + eta (a_g a_g' - a_d a_d'):
//   D: phi'  = -p_gg + p_dd
//      phi'' = p_gg^2 + p_dd^2 - 2 p_gd^2
//   A: phi'  = (-q_gg + q_dd) / t,  t = tr X^{-1}
//      phi'' = (2/t)(q_gg p_gg + q_dd p_dd - 2 q_gd p_gd)
//              - ((q_gg - q_dd)/t)^2
class ExchangeLine {
 public:
  ExchangeLine(const DesignProblem& problem, Criterion criterion,
               const Eigen::VectorXd& x, int gain, int drop)
      : criterion_(criterion),
        X0_(problem.A.transpose() * x.cwiseMax(0.0).asDiagonal() * problem.A),
        a_gain_(problem.A.row(gain).transpose()),
        a_drop_(problem.A.row(drop).transpose()) {}

  LineEval eval(double eta) const {
    const Eigen::Index n = X0_.rows();
    Eigen::MatrixXd X = X0_;
    X.noalias() += eta * (a_gain_ * a_gain_.transpose());
    X.noalias() -= eta * (a_drop_ * a_drop_.transpose());

    Eigen::LLT<Eigen::MatrixXd> llt(X);
    LineEval ev;
    if (llt.info() != Eigen::Success) return ev;
    Eigen::MatrixXd L = llt.matrixL();
    double min_diag = L.diagonal().minCoeff();
    double max_diag_x = X.diagonal().maxCoeff();
    if (!(min_diag * min_diag > kPivotRelTol * std::max(max_diag_x, 0.0)))
      return ev;
    ev.in_domain = true;

    Eigen::VectorXd yg = L.triangularView<Eigen::Lower>().solve(a_gain_);
    Eigen::VectorXd yd = L.triangularView<Eigen::Lower>().solve(a_drop_);
    const double pgg = yg.squaredNorm();
    const double pdd = yd.squaredNorm();
    const double pgd = yg.dot(yd);

    if (criterion_ == Criterion::DOptimal) {
      ev.dphi = -pgg + pdd;
      ev.d2phi = pgg * pgg + pdd * pdd - 2.0 * pgd * pgd;
      return ev;
    }
    Eigen::VectorXd zg =
        L.transpose().triangularView<Eigen::Upper>().solve(yg);
    Eigen::VectorXd zd =
        L.transpose().triangularView<Eigen::Upper>().solve(yd);
    const double qgg = zg.squaredNorm();
    const double qdd = zd.squaredNorm();
    const double qgd = zg.dot(zd);
    Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(n, n));
    const double t = Linv.squaredNorm();
    ev.dphi = (-qgg + qdd) / t;
    ev.d2phi = (2.0 / t) * (qgg * pgg + qdd * pdd - 2.0 * qgd * pgd) -
               ((qgg - qdd) / t) * ((qgg - qdd) / t);
    return ev;
  }

 private:
  Criterion criterion_;
  Eigen::MatrixXd X0_;
  Eigen::VectorXd a_gain_, a_drop_;
};

}  // namespace

double vem_step_size(const DesignProblem& problem, Criterion criterion,
                     const Eigen::VectorXd& x, int gain, int drop,
                     double cap) {
  if (!(cap > 0.0)) return 0.0;
  ExchangeLine line(problem, criterion, x, gain, drop);

  LineEval at0 = line.eval(0.0);
  if (!at0.in_domain)
    throw DomainError("information matrix is singular at this design");
  if (at0.dphi >= 0.0) return 0.0;  // no strict descent along the exchange

  LineEval at_cap = line.eval(cap);
  if (at_cap.in_domain && at_cap.dphi <= 0.0) return cap;

  // phi is convex along the exchange, so phi' crosses zero once in (0, cap);
  // out-of-domain points count as being past the root. Newton from the
  // descent side, safeguarded by bisection.
  double lo = 0.0, hi = cap;
  double dlo = at0.dphi, d2lo = at0.d2phi;
  const double width_tol = 1e-12 * std::max(1.0, cap);
  for (int it = 0; it < 200 && hi - lo > width_tol; ++it) {
    double candidate = 0.5 * (lo + hi);
    if (d2lo > 0.0) {
      double newton = lo - dlo / d2lo;
      if (newton > lo && newton < hi) candidate = newton;
    }
    if (candidate <= lo || candidate >= hi) break;
    LineEval ev = line.eval(candidate);
    if (!ev.in_domain || ev.dphi > 0.0) {
      hi = candidate;
    } else {
      lo = candidate;
      dlo = ev.dphi;
      d2lo = ev.d2phi;
      if (dlo >= 0.0) break;
    }
  }
  return lo;
}

VemResult solve_vem(const DesignProblem& problem, Criterion criterion,
                    const BoxSimplex& set, const Eigen::VectorXd& x0,
                    double tol, long max_iter, const IterateObserver& observer) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  set.validate();
  if (set.empty())
    throw InfeasibleError("relaxation is infeasible: empty budget set");

  auto [x, state] = detail::feasible_domain_start(problem, criterion, set, x0);
  VemResult res;
  res.grad_evals = 1;
  if (observer) observer(x, state.f_val);

  bool converged = false;
  while (res.iters < max_iter) {
    ExchangePair pair;
    try {
      pair = select_pair(set, x, state.grad);
    } catch (const DegenerateSetError&) {
      converged = true;  // single-point feasible set
      break;
    }
    if (pair.at_optimum ||
        state.grad[pair.drop] - state.grad[pair.gain] <=
            tol * std::max(1.0, std::abs(state.grad[pair.gain]))) {
      converged = true;
      break;
    }

    const double cap = std::min(set.upper[pair.gain] - x[pair.gain],
                                x[pair.drop] - set.lower[pair.drop]);
    const double eta =
        vem_step_size(problem, criterion, x, pair.gain, pair.drop, cap);
    assert(eta > 0.0);
    if (!(eta > 0.0)) break;  // numerically stalled exchange; stay honest
                              // and report non-convergence
    x[pair.gain] = std::min(x[pair.gain] + eta, set.upper[pair.gain]);
    x[pair.drop] = std::max(x[pair.drop] - eta, set.lower[pair.drop]);
    state = build_state(problem, criterion, x);
    ++res.iters;
    ++res.grad_evals;
    if (observer) observer(x, state.f_val);
  }

  res.converged = converged;
  res.x = std::move(x);
  res.f = state.f_val;
  return res;
}

}  // namespace oed
