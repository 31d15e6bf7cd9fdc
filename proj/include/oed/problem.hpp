// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>

#include "oed/errors.hpp"

namespace oed {

// Design criterion: A minimizes log tr X^{-1}, D minimizes -log det X,
// where X(x) = A' Diag(x) A is the information matrix of the design x.
enum class Criterion { AOptimal, DOptimal };

const char* to_string(Criterion criterion);

// Accepts "A", "a", "D", "d"; throws ParseError otherwise.
Criterion criterion_from_string(std::string_view text);

// An exact design instance: m candidate experiments (rows of A) over n model
// parameters, a total repetition budget N, and per-experiment repetition caps.
struct DesignProblem {
  Eigen::MatrixXd A;     // m x n, full column rank
  int budget = 0;        // N, total number of experiments to run
  Eigen::VectorXi caps;  // per-row repetition caps, length m

  int num_experiments() const { return static_cast<int>(A.rows()); }
  int num_params() const { return static_cast<int>(A.cols()); }

  // Checks m >= n >= 1, budget >= n, caps >= 1, caps.sum() >= budget, and
  // full column rank. Throws std::invalid_argument on shape/budget violations
  // and RankError when A is column-rank-deficient.
  void validate() const;
};

}  // namespace oed
