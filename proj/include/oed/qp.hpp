// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "oed/box_simplex.hpp"

namespace oed {

// Quadratic model of the criterion around a reference point:
//   q(z) = f0 + grad0'(z - x_ref) + 0.5 (z - x_ref)' hess (z - x_ref).
struct QpModel {
  Eigen::VectorXd grad0;
  Eigen::MatrixXd hess;
  Eigen::VectorXd x_ref;
  double f0 = 0.0;
  double hess_max_abs = 0.0;  // largest |hess_ij|, cached for the step rule

  QpModel() = default;
  QpModel(Eigen::VectorXd grad0_in, Eigen::MatrixXd hess_in,
          Eigen::VectorXd x_ref_in, double f0_in);

  double value(const Eigen::VectorXd& z) const;
};

Eigen::VectorXd qp_gradient(const QpModel& model, const Eigen::VectorXd& z);

// Exact minimizer of q along z + eta (e_gain - e_drop) for eta >= 0, clipped
// to the box: eta* = min{upper_gain - z_gain, z_drop - lower_drop,
// (g_drop - g_gain) / curv} with curv = H_gg + H_dd - H_gd - H_dg. When curv
// falls at or below 1e-14 * hess_max_abs the model is flat along the exchange
// and the step runs to the box bound.
double qp_step(const QpModel& model, const Eigen::VectorXd& z,
               const Eigen::VectorXd& g, int gain, int drop,
               const BoxSimplex& set);

enum class QpStatus { Converged, IterLimit };

struct QpResult {
  Eigen::VectorXd z;
  double gap = 0.0;  // max_{x in F} <grad q(z), z - x>, recomputed from
                     // scratch at termination
  long iters = 0;
  QpStatus status = QpStatus::Converged;
};

// Minimizes q over the set by pairwise exchanges with exact line steps and
// O(m) incremental gradient updates. Terminates once the duality-style gap
// certificate drops to eps^2 (checked every dim() iterations against the
// incrementally maintained gradient, then confirmed against a freshly
// recomputed one) or when the exchange rule proves exact optimality.
// max_iter < 0 selects the default cap of 50 * dim()^2. z0 must be feasible.
QpResult solve_qp(const QpModel& model, const BoxSimplex& set,
                  const Eigen::VectorXd& z0, double eps, long max_iter = -1);

}  // namespace oed
