// SPDX-License-Identifier: Apache-2.0
#include "oed/box_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oed {

double BoxSimplex::activity_tol() const {
  return 1e-10 * std::max(1.0, budget);
}

void BoxSimplex::validate() const {
  if (lower.size() != upper.size())
    throw std::invalid_argument("bound vectors must have equal length");
  if (lower.size() == 0) throw std::invalid_argument("empty bound vectors");
  if (lower.minCoeff() < 0.0)
    throw std::invalid_argument("lower bounds must be nonnegative");
  if (((upper - lower).array() < 0.0).any())
    throw std::invalid_argument("upper bounds must dominate lower bounds");
}

bool is_feasible(const BoxSimplex& set, const Eigen::VectorXd& x, double tol) {
  if (x.size() != set.lower.size()) return false;
  if (std::abs(x.sum() - set.budget) > tol) return false;
  return ((x - set.lower).array() >= -tol).all() &&
         ((set.upper - x).array() >= -tol).all();
}

Eigen::VectorXd project(const BoxSimplex& set, const Eigen::VectorXd& y) {
  set.validate();
  if (set.empty())
    throw EmptySetError("budget set is empty: bounds cannot meet the budget");
  const Eigen::Index m = y.size();
  if (m != set.lower.size())
    throw std::invalid_argument("point has wrong length");

  auto clip_at = [&](double lambda) -> Eigen::VectorXd {
    return (y.array() - lambda)
        .cwiseMax(set.lower.array())
        .cwiseMin(set.upper.array())
        .matrix();
  };

  // clip(y - lambda).sum() is nonincreasing in lambda; bisect to ulp level.
  double lo = (y - set.upper).minCoeff();
  double hi = (y - set.lower).maxCoeff();
  for (int it = 0; it < 200 && lo < hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (clip_at(mid).sum() > set.budget)
      lo = mid;
    else
      hi = mid;
  }
  Eigen::VectorXd x = clip_at(0.5 * (lo + hi));

  // Absorb the leftover budget mismatch (a few ulps) at coordinates with room.
  double r = set.budget - x.sum();
  for (Eigen::Index i = 0; i < m && r != 0.0; ++i) {
    double dx = std::clamp(r, set.lower[i] - x[i], set.upper[i] - x[i]);
    x[i] += dx;
    r -= dx;
  }
  return x;
}

LinearMinResult linear_min(const BoxSimplex& set, const Eigen::VectorXd& g) {
  set.validate();
  if (set.empty())
    throw EmptySetError("budget set is empty: bounds cannot meet the budget");
  const Eigen::Index m = g.size();
  if (m != set.lower.size())
    throw std::invalid_argument("gradient has wrong length");

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g[a] != g[b]) return g[a] < g[b];
    return a < b;
  });

  LinearMinResult res;
  res.x = set.lower;
  double rem = set.budget - set.lower.sum();
  for (int i : order) {
    if (rem <= 0.0) break;
    double add = std::min(rem, set.upper[i] - set.lower[i]);
    res.x[i] += add;
    rem -= add;
  }
  res.value = g.dot(res.x);
  return res;
}

ExchangePair select_pair(const BoxSimplex& set, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& g) {
  const Eigen::Index m = x.size();
  const double act = set.activity_tol();
  ExchangePair pair;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (x[i] < set.upper[i] - act &&
        (pair.gain < 0 || g[i] < g[pair.gain]))
      pair.gain = static_cast<int>(i);
    if (x[i] > set.lower[i] + act &&
        (pair.drop < 0 || g[i] > g[pair.drop]))
      pair.drop = static_cast<int>(i);
  }
  if (pair.gain < 0 || pair.drop < 0)
    throw DegenerateSetError(
        "no exchange pair: every coordinate is pinned at its bound");
  pair.at_optimum = g[pair.gain] >= g[pair.drop];
  return pair;
}

}  // namespace oed
