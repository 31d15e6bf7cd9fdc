// SPDX-License-Identifier: Apache-2.0
#include "oed/problem.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace oed {

const char* to_string(Criterion criterion) {
  return criterion == Criterion::AOptimal ? "A" : "D";
}

Criterion criterion_from_string(std::string_view text) {
  if (text == "A" || text == "a") return Criterion::AOptimal;
  if (text == "D" || text == "d") return Criterion::DOptimal;
  throw ParseError("unknown criterion '" + std::string(text) +
                   "' (expected A or D)");
}

void DesignProblem::validate() const {
  const int m = num_experiments();
  const int n = num_params();
  if (n < 1 || m < n)
    throw std::invalid_argument("design matrix must satisfy m >= n >= 1");
  if (caps.size() != m)
    throw std::invalid_argument("caps length must equal the number of rows");
  if (budget < n)
    throw std::invalid_argument("budget must be at least the parameter count");
  if ((caps.array() < 1).any())
    throw std::invalid_argument("every cap must be at least 1");
  if (caps.cast<long>().sum() < budget)
    throw InfeasibleError("caps sum below the budget: no design exists");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < n) throw RankError("design matrix is column-rank-deficient");
}

}  // namespace oed
