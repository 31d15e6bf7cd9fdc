// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "oed/problem.hpp"

namespace oed {

struct CriteriaOptions {
  // Dense m x m products are materialized in one shot only up to this row
  // count; larger instances fall back to a row-blocked computation so the
  // peak working set stays bounded.
  int full_matrix_cap = 512;
};

// Everything the solvers need at a design point x, computed from one Cholesky
// factorization of X(x) = A' Diag(x) A. Immutable after construction and safe
// to share across threads.
//
// With X = L L', the factor W = A L^{-T} gives A X^{-1} A' = W W' and
// V = A X^{-1} gives A X^{-2} A' = V V', so gradients need only row norms and
// the m x m products are deferred until a Hessian is requested.
struct CriterionState {
  Criterion criterion = Criterion::DOptimal;
  Eigen::VectorXd x;        // design weights the state was built at
  Eigen::MatrixXd chol;     // lower-triangular L with L L' = X(x)
  Eigen::MatrixXd W;        // A L^{-T}
  Eigen::MatrixXd V;        // A X^{-1}; A-criterion only, else empty
  Eigen::VectorXd diag_m1;  // diag(A X^{-1} A')
  Eigen::VectorXd diag_m2;  // diag(A X^{-2} A'); A-criterion only, else empty
  double trace_inv = 0.0;   // tr X^{-1}; A-criterion only, else 0
  double f_val = 0.0;       // criterion value at x
  Eigen::VectorXd grad;     // criterion gradient at x
};

// Factorizes X(x) and fills the state. Requires x.size() == m and x >= 0
// (entries above -1e-9 are clamped to zero). Throws DomainError when X(x) is
// numerically singular: a Cholesky pivot falls below 1e-12 times the largest
// diagonal entry of X.
CriterionState build_state(const DesignProblem& problem, Criterion criterion,
                           const Eigen::VectorXd& x);

// Dense m x m Hessian of the criterion at the state's design point.
// D: (A X^{-1} A') ∘ (A X^{-1} A').
// A: (2/t) (A X^{-2} A') ∘ (A X^{-1} A') - (1/t^2) d2 d2' with t = tr X^{-1}
//    and d2 = diag(A X^{-2} A').
// The result is exactly symmetric and positive semidefinite up to roundoff.
Eigen::MatrixXd hessian(const CriterionState& state,
                        const CriteriaOptions& options = {});

// Local norm sqrt(d' H d) of a direction d at the state's design point;
// tiny negative quadratic forms from roundoff are clamped to zero.
double local_norm(const CriterionState& state, const Eigen::VectorXd& d);

// Same, with the Hessian already materialized.
double local_norm(const Eigen::MatrixXd& hess, const Eigen::VectorXd& d);

}  // namespace oed
