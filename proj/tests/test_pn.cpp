// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oed/pn.hpp"
#include "oed/rng.hpp"
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

}  // namespace

TEST_SUITE("pn") {

TEST_CASE("threshold function hand values") {
  // h(1/4) = (1/4)(5/8) / (7/32) = 5/7 exactly.
  CHECK(oed::h_fn(0.25) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  CHECK(oed::h_fn(0.1) ==
        doctest::Approx(0.12852664576802508).epsilon(1e-13));
  CHECK(oed::h_fn(0.0) == 0.0);

  // Smallest positive root of the denominator 1 - 4t + 4t^2 - 2t^3.
  double sup = oed::h_domain_sup();
  CHECK(sup == doctest::Approx(0.35220112873895761).epsilon(1e-12));

  // Strictly increasing on a grid inside the domain.
  double prev = -1.0;
  for (int k = 0; k <= 30; ++k) {
    double t = sup * k / 31.0;
    double v = oed::h_fn(t);
    CHECK(v > prev);
    prev = v;
  }

  CHECK_THROWS_AS(oed::h_fn(-1e-12), oed::DomainError);
  CHECK_THROWS_AS(oed::h_fn(sup), oed::DomainError);
  CHECK_THROWS_AS(oed::h_fn(0.5), oed::DomainError);
}

TEST_CASE("threshold inverse round-trips") {
  CHECK(oed::h_inv(0.0) == 0.0);
  CHECK(oed::h_inv(0.1) ==
        doctest::Approx(0.082118594500717040).epsilon(1e-10));
  CHECK(oed::h_inv(1.0) ==
        doctest::Approx(0.27330117424179812).epsilon(1e-10));

  for (double y : {1e-6, 1e-3, 0.05, 0.1, 0.3, 1.0, 7.0, 1e3, 1e6}) {
    double t = oed::h_inv(y);
    CHECK(t >= 0.0);
    CHECK(t < oed::h_domain_sup());
    CHECK(oed::h_fn(t) == doctest::Approx(y).epsilon(1e-9));
  }

  // Monotone in the target.
  CHECK(oed::h_inv(0.2) > oed::h_inv(0.1));
  CHECK_THROWS_AS(oed::h_inv(-1e-9), oed::DomainError);
}

TEST_CASE("parameter validation") {
  oed::PnParams p;
  CHECK_NOTHROW(p.validate());  // defaults satisfy both inequalities

  oed::PnParams ok;
  ok.beta = 0.05;
  ok.sigma = 0.8;
  ok.c = 3.0;
  CHECK_NOTHROW(ok.validate());

  auto expect_reject = [](auto&& tweak) {
    oed::PnParams q;
    tweak(q);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  };
  expect_reject([](oed::PnParams& q) { q.beta = 0.0; });
  expect_reject([](oed::PnParams& q) { q.beta = 0.5; });
  expect_reject([](oed::PnParams& q) { q.sigma = 0.0; });
  expect_reject([](oed::PnParams& q) { q.sigma = 1.0; });
  expect_reject([](oed::PnParams& q) { q.delta = 0.0; });
  expect_reject([](oed::PnParams& q) { q.delta = 1.5; });
  expect_reject([](oed::PnParams& q) { q.c = 1.0; });
  expect_reject([](oed::PnParams& q) { q.c1 = 1.0; });
  expect_reject([](oed::PnParams& q) { q.tol = 0.0; });
  expect_reject([](oed::PnParams& q) { q.max_outer = 0; });
  // Bounds fine but the first convergence inequality fails.
  expect_reject([](oed::PnParams& q) { q.sigma = 0.6; });
  // Bounds fine but both inequalities fail.
  expect_reject([](oed::PnParams& q) {
    q.beta = 0.3;
    q.sigma = 0.9;
  });
}

TEST_CASE("toy relaxation reaches the dominant-row vertex") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 2.0 / 3.0);
  const double f_star = -std::log(18.0);
  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    auto res = oed::solve_relaxation(p, crit, s, x0);
    CHECK(res.stats.converged);
    CHECK(res.f == doctest::Approx(f_star).epsilon(1e-9));
    CHECK(res.x[0] == doctest::Approx(0.0).scale(1).epsilon(1e-6));
    CHECK(res.x[1] == doctest::Approx(0.0).scale(1).epsilon(1e-6));
    CHECK(res.x[2] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(oed::is_feasible(s, res.x, 1e-9));
  }
}

TEST_CASE("warm start at the optimum terminates with no outer work") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd opt(3);
  opt << 0, 0, 2;
  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    auto res = oed::solve_relaxation(p, crit, s, opt);
    CHECK(res.stats.converged);
    CHECK(res.stats.outer_iters == 0);
    CHECK(res.stats.grad_evals == 1);
    CHECK(res.stats.hessian_evals == 0);
    CHECK(res.f == doctest::Approx(-std::log(18.0)).epsilon(1e-12));
  }
}

TEST_CASE("iterates stay feasible and the objective never increases") {
  for (int trial = 0; trial < 8; ++trial) {
    oed::Rng rng = oed::Rng::substream(2000 + trial, "pn-monotone");
    int m = 6 + static_cast<int>(rng.uniform_int(0, 6));
    int n = 2 + static_cast<int>(rng.uniform_int(0, 2));
    oed::DesignProblem p = oracles::random_problem(rng, m, n);
    oed::BoxSimplex s = relax_set(p);
    auto crit = (trial % 2 == 0) ? oed::Criterion::DOptimal
                                 : oed::Criterion::AOptimal;

    std::vector<double> fs;
    oed::IterateObserver obs = [&](const Eigen::VectorXd& x, double f) {
      CHECK(oed::is_feasible(s, x, 1e-9));
      fs.push_back(f);
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(m, p.budget / double(m));
    auto res = oed::solve_relaxation(p, crit, s, x0, {}, obs);
    CHECK(res.stats.converged);
    CHECK(static_cast<int>(fs.size()) == res.stats.outer_iters + 1);
    CHECK(res.stats.grad_evals == res.stats.outer_iters + 1);
    CHECK(res.stats.hessian_evals == res.stats.outer_iters);
    CHECK(res.stats.full_steps + res.stats.damped_steps ==
          res.stats.outer_iters);
    for (std::size_t k = 1; k < fs.size(); ++k)
      CHECK(fs[k] <= fs[k - 1] + 1e-9 * std::max(1.0, std::abs(fs[k - 1])));
    CHECK(res.f == doctest::Approx(fs.back()));

    // Global-optimality spot check: no sampled feasible point does better.
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd y(m);
      for (int i = 0; i < m; ++i) y[i] = 3.0 * rng.uniform01();
      Eigen::VectorXd z = oed::project(s, y);
      double fz = oracles::criterion_value(p, crit, z);
      CHECK(fz >= res.f - 1e-5 * std::max(1.0, std::abs(res.f)));
    }
  }
}

TEST_CASE("full-step phase is absorbing") {
  int triggered = 0;
  for (int trial = 0; trial < 8; ++trial) {
    oed::Rng rng = oed::Rng::substream(2100 + trial, "pn-phase");
    int m = 8 + static_cast<int>(rng.uniform_int(0, 5));
    int n = 2 + static_cast<int>(rng.uniform_int(0, 2));
    oed::DesignProblem p = oracles::random_problem(rng, m, n, 1, 4);
    oed::BoxSimplex s = relax_set(p);
    auto crit = (trial % 2 == 0) ? oed::Criterion::DOptimal
                                 : oed::Criterion::AOptimal;
    oed::PnParams params;
    params.tol = 1e-8;  // push the solve deep into the full-step phase
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(m, p.budget / double(m));
    auto res = oed::solve_relaxation(p, crit, s, x0, params);
    CHECK(res.stats.converged);

    if (res.stats.first_full_trigger >= 0) {
      ++triggered;
      // Every step after the first trigger must be a full step.
      CHECK(res.stats.steps_after_trigger == res.stats.full_after_trigger);
    }
    // lambda and eps shrink by sigma exactly once per full step.
    const double h_inv_beta = oed::h_inv(params.beta);
    const double eps0 =
        std::min(params.beta / params.c, params.c1 * h_inv_beta);
    const double shrink = std::pow(params.sigma, res.stats.full_steps);
    CHECK(res.stats.final_eps ==
          doctest::Approx(eps0 * shrink).epsilon(1e-12));
    CHECK(res.stats.final_lambda ==
          doctest::Approx(params.beta / params.sigma * shrink)
              .epsilon(1e-12));
  }
  CHECK(triggered >= 4);  // the trigger must actually fire on most instances
}

TEST_CASE("rank-deficient start is repaired, not rejected") {
  // Rows 0 and 1 are colinear, so a start supported on them alone has a
  // rank-one information matrix for n = 2.
  Eigen::MatrixXd A(6, 2);
  A << 1, 0, 2, 0, 0.3, 1.1, -0.7, 0.4, 1.2, -0.8, 0.5, 0.9;
  oed::DesignProblem p =
      oracles::make_problem(A, 4, Eigen::VectorXi::Constant(6, 3));
  oed::BoxSimplex s = relax_set(p);

  Eigen::VectorXd bad(6);
  bad << 3, 1, 0, 0, 0, 0;

  for (auto crit : {oed::Criterion::DOptimal, oed::Criterion::AOptimal}) {
    auto res = oed::solve_relaxation(p, crit, s, bad);
    CHECK(res.stats.converged);
    CHECK(oed::is_feasible(s, res.x, 1e-9));
    CHECK(std::isfinite(res.f));

    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(6, s.budget / 6.0);
    auto ref = oed::solve_relaxation(p, crit, s, x0);
    CHECK(res.f == doctest::Approx(ref.f).epsilon(1e-5));
  }
}

TEST_CASE("deterministic: identical runs produce identical iterates") {
  oed::Rng rng = oed::Rng::substream(7, "pn-determinism");
  oed::DesignProblem p = oracles::random_problem(rng, 10, 3);
  oed::BoxSimplex s = relax_set(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(10, p.budget / 10.0);
  auto r1 = oed::solve_relaxation(p, oed::Criterion::AOptimal, s, x0);
  auto r2 = oed::solve_relaxation(p, oed::Criterion::AOptimal, s, x0);
  CHECK(r1.f == r2.f);
  CHECK(r1.stats.outer_iters == r2.stats.outer_iters);
  CHECK(r1.stats.qp_iters == r2.stats.qp_iters);
  for (int i = 0; i < 10; ++i) CHECK(r1.x[i] == r2.x[i]);
}

TEST_CASE("empty set and bad parameters are rejected up front") {
  oed::DesignProblem p = toy_problem();
  oed::BoxSimplex s = relax_set(p);
  s.budget = 100;  // caps sum to 6
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 1.0);
  CHECK_THROWS_AS(
      oed::solve_relaxation(p, oed::Criterion::DOptimal, s, x0),
      oed::InfeasibleError);

  oed::BoxSimplex good = relax_set(p);
  oed::PnParams bad;
  bad.sigma = 0.2;
  CHECK_THROWS_AS(
      oed::solve_relaxation(p, oed::Criterion::DOptimal, good, x0, bad),
      std::invalid_argument);
}

}  // TEST_SUITE
