// SPDX-License-Identifier: Apache-2.0
#include "oed/qp.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace oed {
namespace {

constexpr double kCurvatureRelFloor = 1e-14;

double certified_gap(const QpModel& model, const BoxSimplex& set,
                     const Eigen::VectorXd& z, Eigen::VectorXd& g_out) {
  g_out = qp_gradient(model, z);
  return g_out.dot(z) - linear_min(set, g_out).value;
}

}  // namespace

QpModel::QpModel(Eigen::VectorXd grad0_in, Eigen::MatrixXd hess_in,
                 Eigen::VectorXd x_ref_in, double f0_in)
    : grad0(std::move(grad0_in)),
      hess(std::move(hess_in)),
      x_ref(std::move(x_ref_in)),
      f0(f0_in),
      hess_max_abs(hess.size() > 0 ? hess.cwiseAbs().maxCoeff() : 0.0) {}

double QpModel::value(const Eigen::VectorXd& z) const {
  Eigen::VectorXd d = z - x_ref;
  return f0 + grad0.dot(d) + 0.5 * d.dot(hess * d);
}

Eigen::VectorXd qp_gradient(const QpModel& model, const Eigen::VectorXd& z) {
  return model.grad0 + model.hess * (z - model.x_ref);
}

double qp_step(const QpModel& model, const Eigen::VectorXd& z,
               const Eigen::VectorXd& g, int gain, int drop,
               const BoxSimplex& set) {
  const double box = std::min(set.upper[gain] - z[gain],
                              z[drop] - set.lower[drop]);
  const double curv = model.hess(gain, gain) + model.hess(drop, drop) -
                      model.hess(gain, drop) - model.hess(drop, gain);
  // Flat or numerically degenerate direction: the model decreases all the
  // way, so run to the box bound.
  if (curv <= kCurvatureRelFloor * model.hess_max_abs) return box;
  return std::min(box, (g[drop] - g[gain]) / curv);
}

QpResult solve_qp(const QpModel& model, const BoxSimplex& set,
                  const Eigen::VectorXd& z0, double eps, long max_iter) {
  set.validate();
  if (set.empty())
    throw EmptySetError("budget set is empty: bounds cannot meet the budget");
  const long m = set.dim();
  if (max_iter < 0) max_iter = 50 * m * m;
  const long stride = std::max<long>(1, m);
  const double eps2 = eps * eps;

  QpResult res;
  res.z = z0;
  res.status = QpStatus::IterLimit;
  Eigen::VectorXd g = qp_gradient(model, res.z);

  while (true) {
    ExchangePair pair;
    try {
      pair = select_pair(set, res.z, g);
    } catch (const DegenerateSetError&) {
      // Single-point feasible set: z is the only candidate.
      res.status = QpStatus::Converged;
      break;
    }
    if (pair.at_optimum) {
      // No feasible descent exchange exists, so z is exactly optimal.
      res.status = QpStatus::Converged;
      break;
    }
    if (res.iters % stride == 0) {
      double quick = g.dot(res.z) - linear_min(set, g).value;
      if (quick <= eps2) {
        // Confirm against a gradient rebuilt from the model before stopping;
        // the incremental one may have drifted.
        double fresh = certified_gap(model, set, res.z, g);
        if (fresh <= eps2) {
          res.status = QpStatus::Converged;
          break;
        }
        continue;  // drift was real: resume with the rebuilt gradient
      }
    }
    if (res.iters >= max_iter) {
      res.status = QpStatus::IterLimit;
      break;
    }

    const double eta = qp_step(model, res.z, g, pair.gain, pair.drop, set);
    res.z[pair.gain] =
        std::min(res.z[pair.gain] + eta, set.upper[pair.gain]);
    res.z[pair.drop] =
        std::max(res.z[pair.drop] - eta, set.lower[pair.drop]);
    g += eta * (model.hess.col(pair.gain) - model.hess.col(pair.drop));
    ++res.iters;
  }

  res.gap = certified_gap(model, set, res.z, g);
  return res;
}

}  // namespace oed
