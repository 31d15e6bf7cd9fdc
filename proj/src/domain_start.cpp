// SPDX-License-Identifier: Apache-2.0
#include "domain_start.hpp"

namespace oed::detail {

std::pair<Eigen::VectorXd, CriterionState> feasible_domain_start(
    const DesignProblem& problem, Criterion criterion, const BoxSimplex& set,
    const Eigen::VectorXd& x0) {
  Eigen::VectorXd x = project(set, x0);
  try {
    CriterionState st = build_state(problem, criterion, x);
    return {std::move(x), std::move(st)};
  } catch (const DomainError&) {
  }

  const Eigen::Index m = set.dim();
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
      m, set.budget / static_cast<double>(m));
  const Eigen::VectorXd spread = project(set, uniform);
  for (double theta : {0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.0}) {
    Eigen::VectorXd blend = (1.0 - theta) * x + theta * spread;
    try {
      CriterionState st = build_state(problem, criterion, blend);
      return {std::move(blend), std::move(st)};
    } catch (const DomainError&) {
    }
  }
  throw DomainError(
      "no feasible design with nonsingular information matrix was found");
}

}  // namespace oed::detail
