// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <utility>

#include "oed/box_simplex.hpp"
#include "oed/criteria.hpp"

namespace oed::detail {

// Projects x0 onto the set and, when the information matrix is singular
// there, blends toward the projected uniform design with doubling weights
// theta in {0.01, 0.02, ..., 0.64, 1.0} until the criterion's domain is
// reached. Returns the start point and its state. Throws DomainError when
// even the uniform blend fails and EmptySetError when the set is empty.
std::pair<Eigen::VectorXd, CriterionState> feasible_domain_start(
    const DesignProblem& problem, Criterion criterion, const BoxSimplex& set,
    const Eigen::VectorXd& x0);

}  // namespace oed::detail
