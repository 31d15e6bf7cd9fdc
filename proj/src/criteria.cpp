// SPDX-License-Identifier: Apache-2.0
#include "oed/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace oed {
namespace {

constexpr double kPivotRelTol = 1e-12;  // Cholesky pivot floor, relative
constexpr double kWeightSlack = 1e-9;   // tolerated negative weight noise

// Left-looking Cholesky with a relative pivot floor. Returns false when a
// pivot falls at or below rel_tol times the largest diagonal entry of X.
bool cholesky_lower(const Eigen::MatrixXd& X, double rel_tol,
                    Eigen::MatrixXd& L) {
  const Eigen::Index n = X.rows();
  double max_diag = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) max_diag = std::max(max_diag, X(k, k));
  if (!(max_diag > 0.0)) return false;
  const double floor = rel_tol * max_diag;

  L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = X(k, k) - L.row(k).head(k).squaredNorm();
    if (!(pivot > floor)) return false;
    L(k, k) = std::sqrt(pivot);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double s = X(i, k) - L.row(i).head(k).dot(L.row(k).head(k));
      L(i, k) = s / L(k, k);
    }
  }
  return true;
}

}  // namespace

CriterionState build_state(const DesignProblem& problem, Criterion criterion,
                           const Eigen::VectorXd& x) {
  const Eigen::Index m = problem.A.rows();
  const Eigen::Index n = problem.A.cols();
  if (x.size() != m)
    throw std::invalid_argument("design weight vector has wrong length");
  if (x.minCoeff() < -kWeightSlack)
    throw std::invalid_argument("design weights must be nonnegative");

  CriterionState st;
  st.criterion = criterion;
  st.x = x.cwiseMax(0.0);

  Eigen::MatrixXd X = problem.A.transpose() * st.x.asDiagonal() * problem.A;
  if (!cholesky_lower(X, kPivotRelTol, st.chol))
    throw DomainError("information matrix is singular at this design");
  const auto L = st.chol.triangularView<Eigen::Lower>();

  Eigen::MatrixXd Wt = L.solve(problem.A.transpose());  // n x m, = L^{-1} A'
  st.W = Wt.transpose();
  st.diag_m1 = st.W.rowwise().squaredNorm();

  if (criterion == Criterion::DOptimal) {
    st.f_val = -2.0 * st.chol.diagonal().array().log().sum();
    st.grad = -st.diag_m1;
  } else {
    Eigen::MatrixXd Vt =
        st.chol.transpose().triangularView<Eigen::Upper>().solve(Wt);
    st.V = Vt.transpose();  // A X^{-1}
    st.diag_m2 = st.V.rowwise().squaredNorm();
    Eigen::MatrixXd Linv = L.solve(Eigen::MatrixXd::Identity(n, n));
    st.trace_inv = Linv.squaredNorm();
    st.f_val = std::log(st.trace_inv);
    st.grad = -st.diag_m2 / st.trace_inv;
  }
  return st;
}

Eigen::MatrixXd hessian(const CriterionState& state,
                        const CriteriaOptions& options) {
  const Eigen::Index m = state.W.rows();
  Eigen::MatrixXd H(m, m);

  if (state.criterion == Criterion::DOptimal) {
    if (m <= options.full_matrix_cap) {
      Eigen::MatrixXd M1 = state.W * state.W.transpose();
      H = M1.cwiseProduct(M1);
    } else {
      const Eigen::Index block = 256;
      for (Eigen::Index i0 = 0; i0 < m; i0 += block) {
        Eigen::Index b = std::min(block, m - i0);
        Eigen::MatrixXd M1r = state.W.middleRows(i0, b) * state.W.transpose();
        H.middleRows(i0, b) = M1r.cwiseProduct(M1r);
      }
    }
  } else {
    const double t = state.trace_inv;
    if (m <= options.full_matrix_cap) {
      Eigen::MatrixXd M1 = state.W * state.W.transpose();
      Eigen::MatrixXd M2 = state.V * state.V.transpose();
      H = (2.0 / t) * M2.cwiseProduct(M1) -
          (1.0 / (t * t)) * (state.diag_m2 * state.diag_m2.transpose());
    } else {
      const Eigen::Index block = 256;
      for (Eigen::Index i0 = 0; i0 < m; i0 += block) {
        Eigen::Index b = std::min(block, m - i0);
        Eigen::MatrixXd M1r = state.W.middleRows(i0, b) * state.W.transpose();
        Eigen::MatrixXd M2r = state.V.middleRows(i0, b) * state.V.transpose();
        H.middleRows(i0, b) =
            (2.0 / t) * M2r.cwiseProduct(M1r) -
            (1.0 / (t * t)) *
                (state.diag_m2.segment(i0, b) * state.diag_m2.transpose());
      }
    }
  }
  // Exact symmetry; addition is commutative so H(i,j) == H(j,i) bitwise.
  H = (0.5 * (H + H.transpose())).eval();
  return H;
}

double local_norm(const Eigen::MatrixXd& hess, const Eigen::VectorXd& d) {
  return std::sqrt(std::max(0.0, d.dot(hess * d)));
}

double local_norm(const CriterionState& state, const Eigen::VectorXd& d) {
  return local_norm(hessian(state), d);
}

}  // namespace oed
