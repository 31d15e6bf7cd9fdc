// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oed/pn.hpp"
#include "oed/rng.hpp"
#include "oed/vem.hpp"
#include "support/oracles.hpp"

namespace {

oed::BoxSimplex relax_set(const oed::DesignProblem& p) {
  oed::BoxSimplex s;
  s.budget = p.budget;
  s.lower = Eigen::VectorXd::Zero(p.A.rows());
  s.upper = p.caps.cast<double>();
  return s;
}

oed::DesignProblem toy_problem() {
  Eigen::MatrixXd A(3, 1);
  A << 1, 2, 3;
  return oracles::make_problem(A, 2, Eigen::VectorXi::Constant(3, 2));
}

double phi_at(const oed::DesignProblem& p, oed::Criterion crit,
              const Eigen::VectorXd& x, int gain, int drop, double eta) {
  Eigen::VectorXd y = x;
  y[gain] += eta;
  y[drop] -= eta;
  return oracles::criterion_value(p, crit, y);
}

}  // namespace

TEST_SUITE("vem") {

TEST_CASE("step runs to the cap when the slice keeps descending") {
  oed::DesignProblem p = toy_problem();
  Eigen::VectorXd x(3);
  x << 2, 0, 0;
  // Moving weight from row 1 to row 3 scales the scalar information matrix
  // up monotonically, so the exact step is the box cap.
  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    CHECK(oed::vem_step_size(p, crit, x, 2, 0, 2.0) == 2.0);
  }
}

TEST_CASE("step is zero without strict descent") {
  // Rows 1 and 2 are identical, so exchanging their weights changes nothing.
  Eigen::MatrixXd A(3, 1);
  A << 1, 2, 2;
  oed::DesignProblem p =
      oracles::make_problem(A, 2, Eigen::VectorXi::Constant(3, 2));
  Eigen::VectorXd x(3);
  x << 0, 1, 1;
  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    CHECK(oed::vem_step_size(p, crit, x, 1, 2, 1.0) == 0.0);
    CHECK(oed::vem_step_size(p, crit, x, 1, 2, 0.0) == 0.0);
  }
}

TEST_CASE("interior root has a closed form on a diagonal family") {
  // X(eta) = diag(0.1 + eta, 1 - eta): the determinant is maximized at the
  // balance point eta = 0.45. A cap of 2 overshoots the domain boundary at
  // eta = 1, so the search must treat out-of-domain points as past the root.
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 0;
  oed::DesignProblem p =
      oracles::make_problem(A, 2, Eigen::VectorXi::Constant(3, 3));
  Eigen::VectorXd x(3);
  x << 0, 1, 0.1;
  CHECK(oed::vem_step_size(p, oed::Criterion::DOptimal, x, 0, 1, 2.0) ==
        doctest::Approx(0.45).epsilon(1e-9));
  // Within the domain the same root, found without the overshoot.
  CHECK(oed::vem_step_size(p, oed::Criterion::DOptimal, x, 0, 1, 0.9) ==
        doctest::Approx(0.45).epsilon(1e-9));
}

TEST_CASE("singular information matrix at the start is a domain error") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 0;
  oed::DesignProblem p =
      oracles::make_problem(A, 2, Eigen::VectorXi::Constant(3, 3));
  Eigen::VectorXd x(3);
  x << 0, 0, 0.5;  // only the duplicated direction carries weight
  CHECK_THROWS_AS(
      oed::vem_step_size(p, oed::Criterion::DOptimal, x, 1, 2, 0.5),
      oed::DomainError);
}

TEST_CASE("step minimizes the slice against a fine grid") {
  int tested = 0;
  for (int trial = 0; trial < 12; ++trial) {
    oed::Rng rng = oed::Rng::substream(3000 + trial, "vem-line");
    int m = 5 + static_cast<int>(rng.uniform_int(0, 5));
    int n = 2 + static_cast<int>(rng.uniform_int(0, 2));
    oed::DesignProblem p = oracles::random_problem(rng, m, n);
    oed::BoxSimplex s = relax_set(p);
    auto crit = (trial % 2 == 0) ? oed::Criterion::DOptimal
                                 : oed::Criterion::AOptimal;

    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = 2.0 * rng.uniform01();
    Eigen::VectorXd x = oed::project(s, y);

    oed::CriterionState state;
    try {
      state = oed::build_state(p, crit, x);
    } catch (const oed::DomainError&) {
      continue;
    }
    oed::ExchangePair pair;
    try {
      pair = oed::select_pair(s, x, state.grad);
    } catch (const oed::DegenerateSetError&) {
      continue;
    }
    if (pair.at_optimum) continue;

    const double cap = std::min(s.upper[pair.gain] - x[pair.gain],
                                x[pair.drop] - s.lower[pair.drop]);
    const double eta =
        oed::vem_step_size(p, crit, x, pair.gain, pair.drop, cap);
    CHECK(eta >= 0.0);
    CHECK(eta <= cap);

    const double f_eta = phi_at(p, crit, x, pair.gain, pair.drop, eta);
    CHECK(std::isfinite(f_eta));
    for (int k = 0; k <= 2000; ++k) {
      double t = cap * k / 2000.0;
      double ft = phi_at(p, crit, x, pair.gain, pair.drop, t);
      if (!std::isfinite(ft)) continue;  // slice left the criterion's domain
      CHECK(f_eta <= ft + 1e-9 * std::max(1.0, std::abs(ft)));
    }
    // Local optimality at interior steps: the slice is convex, so small
    // perturbations both ways cannot do better.
    if (eta > 1e-6 && eta < cap - 1e-6) {
      double d = 1e-7 * std::max(1.0, cap);
      CHECK(phi_at(p, crit, x, pair.gain, pair.drop, eta + d) >=
            f_eta - 1e-12);
      CHECK(phi_at(p, crit, x, pair.gain, pair.drop, eta - d) >=
            f_eta - 1e-12);
    }
    ++tested;
  }
  CHECK(tested >= 8);
}

TEST_CASE("toy exchange solve lands on the dominant-row vertex") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 2.0 / 3.0);
  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    auto res = oed::solve_vem(p, crit, s, x0);
    CHECK(res.converged);
    CHECK(res.f == doctest::Approx(-std::log(18.0)).epsilon(1e-9));
    CHECK(res.x[2] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.grad_evals == res.iters + 1);
  }
}

TEST_CASE("warm start at the optimum does no exchanges") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd opt(3);
  opt << 0, 0, 2;
  auto res = oed::solve_vem(p, oed::Criterion::DOptimal, s, opt);
  CHECK(res.converged);
  CHECK(res.iters == 0);
  CHECK(res.grad_evals == 1);
  CHECK(res.f == doctest::Approx(-std::log(18.0)).epsilon(1e-12));
}

TEST_CASE("agrees with the projected-Newton solver") {
  for (int trial = 0; trial < 6; ++trial) {
    oed::Rng rng = oed::Rng::substream(3100 + trial, "vem-cross");
    int m = 6 + static_cast<int>(rng.uniform_int(0, 5));
    int n = 2 + static_cast<int>(rng.uniform_int(0, 2));
    oed::DesignProblem p = oracles::random_problem(rng, m, n);
    oed::BoxSimplex s = relax_set(p);
    auto crit = (trial % 2 == 0) ? oed::Criterion::DOptimal
                                 : oed::Criterion::AOptimal;
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(m, p.budget / double(m));

    auto vem = oed::solve_vem(p, crit, s, x0, 1e-8);
    oed::PnParams params;
    params.tol = 1e-8;
    auto pn = oed::solve_relaxation(p, crit, s, x0, params);
    CHECK(vem.converged);
    CHECK(pn.stats.converged);
    CHECK(vem.f == doctest::Approx(pn.f).epsilon(1e-6));
  }
}

TEST_CASE("iterates stay feasible and the objective strictly descends") {
  for (int trial = 0; trial < 6; ++trial) {
    oed::Rng rng = oed::Rng::substream(3200 + trial, "vem-monotone");
    int m = 6 + static_cast<int>(rng.uniform_int(0, 5));
    oed::DesignProblem p = oracles::random_problem(rng, m, 3);
    oed::BoxSimplex s = relax_set(p);
    auto crit = (trial % 2 == 0) ? oed::Criterion::DOptimal
                                 : oed::Criterion::AOptimal;

    std::vector<double> fs;
    oed::IterateObserver obs = [&](const Eigen::VectorXd& x, double f) {
      CHECK(oed::is_feasible(s, x, 1e-9));
      fs.push_back(f);
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(m, p.budget / double(m));
    auto res = oed::solve_vem(p, crit, s, x0, 1e-6, 100000, obs);
    CHECK(res.converged);
    CHECK(static_cast<long>(fs.size()) == res.iters + 1);
    CHECK(res.grad_evals == res.iters + 1);
    for (std::size_t k = 1; k < fs.size(); ++k) CHECK(fs[k] < fs[k - 1]);
  }
}

TEST_CASE("iteration budget reports honestly") {
  oed::Rng rng = oed::Rng::substream(3300, "vem-cap");
  oed::DesignProblem p = oracles::random_problem(rng, 8, 3);
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(8, p.budget / 8.0);
  auto res = oed::solve_vem(p, oed::Criterion::DOptimal, s, x0, 1e-12, 2);
  if (!res.converged) {
    CHECK(res.iters == 2);
    CHECK(res.grad_evals == 3);
  }
  CHECK(oed::is_feasible(s, res.x, 1e-9));

  auto none = oed::solve_vem(p, oed::Criterion::DOptimal, s, x0, 1e-12, 0);
  CHECK_FALSE(none.converged);
  CHECK(none.iters == 0);
  CHECK(none.grad_evals == 1);
}

TEST_CASE("empty set and bad arguments are rejected") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 2.0 / 3.0);
  oed::BoxSimplex empty = s;
  empty.budget = 100;
  CHECK_THROWS_AS(oed::solve_vem(p, oed::Criterion::DOptimal, empty, x0),
                  oed::InfeasibleError);
  CHECK_THROWS_AS(oed::solve_vem(p, oed::Criterion::DOptimal, s, x0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(oed::solve_vem(p, oed::Criterion::DOptimal, s, x0, 1e-6, -1),
                  std::invalid_argument);
}

}  // TEST_SUITE
