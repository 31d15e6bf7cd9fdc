// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <functional>

namespace oed {

// Optional per-iterate callback for the relaxation solvers: invoked with the
// current design and criterion value after the start point and after every
// accepted step. Used by tests to check feasibility and monotonicity traces.
using IterateObserver = std::function<void(const Eigen::VectorXd& x, double f)>;

}  // namespace oed
