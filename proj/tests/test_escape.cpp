// Copyright 2026 The varsp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "varsp/escape.hpp"
#include "varsp/experiments.hpp"

namespace varsp {
namespace {

ObservedMatrix full_observation(const DenseMatrix& x) {
  std::vector<Entry> e;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) e.push_back({i, j, x(i, j)});
  return ObservedMatrix(x.rows(), x.cols(), std::move(e));
}

TEST_CASE("decide_escape: worked cases") {
  SUBCASE("sigma 3, p 0.5, lambda 1 is accepted") {
    const EscapeDecision d = decide_escape(3.0, 1.0, 0.5);
    CHECK(d.accepted);
    CHECK(d.mu == doctest::Approx(2.0));
    CHECK(d.tau == doctest::Approx(std::sqrt(2.0)));
    CHECK(d.descent_value == doctest::Approx(-4.0 + std::sqrt(2.0)));
    CHECK(d.descent_value == doctest::Approx(-2.586).epsilon(1e-3));
    const auto f = [](double t) { return oracle::escape_f(t, 3.0, 1.0, 0.5); };
    CHECK(oracle::grid_minimize(f, oracle::escape_grid_hi(3.0), 1e-4).value < 0.0);
  }
  SUBCASE("sigma 3, p 0.5, lambda 10 is rejected") {
    const EscapeDecision d = decide_escape(3.0, 10.0, 0.5);
    CHECK_FALSE(d.accepted);
    CHECK(d.tau == 0.0);
    const auto f = [](double t) { return oracle::escape_f(t, 3.0, 10.0, 0.5); };
    const oracle::GridMin g = oracle::grid_minimize(f, oracle::escape_grid_hi(3.0), 1e-4);
    CHECK(g.arg == 0.0);
    CHECK(g.value == 0.0);
  }
  SUBCASE("zero residual") {
    const EscapeDecision d = escape_decision(DenseMatrix::Zero(3, 3), 1.0, 0.5);
    CHECK(d.sigma == 0.0);
    CHECK(d.mu == 0.0);
    CHECK_FALSE(d.accepted);
  }
  SUBCASE("p = 1 uses the nuclear-norm rule") {
    const EscapeDecision a = decide_escape(3.0, 1.0, 1.0);
    CHECK(a.accepted);
    CHECK(a.tau * a.tau == doctest::Approx(2.0));
    CHECK(a.descent_value == doctest::Approx(-2.0));
    CHECK_FALSE(decide_escape(1.0, 3.0, 1.0).accepted);
  }
  SUBCASE("bad input") {
    DenseMatrix r = DenseMatrix::Ones(2, 2);
    r(0, 0) = std::nan("");
    CHECK_THROWS_AS(escape_decision(r, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(decide_escape(1.0, 1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("closed-form tau minimizes the scaled ray objective on the grid") {
  for (double sigma : {0.5, 1.0, 3.0, 10.0}) {
    for (double p : {0.1, 0.3, 0.5, 0.9}) {
      for (double lambda : {0.1, 1.0, 10.0}) {
        const EscapeDecision d = decide_escape(sigma, lambda, p);
        const double hi = oracle::escape_grid_hi(sigma);
        const auto g = [&](double t) { return oracle::escape_g(t, sigma, lambda, p); };
        const auto f = [&](double t) { return oracle::escape_f(t, sigma, lambda, p); };
        const oracle::GridMin gmin = oracle::grid_minimize(g, hi, 1e-4, true);
        const oracle::GridMin fmin = oracle::grid_minimize(f, hi, 1e-4);
        CAPTURE(sigma);
        CAPTURE(p);
        CAPTURE(lambda);
        CHECK(std::abs(std::sqrt(d.mu) - gmin.arg) <= 1e-3);
        CHECK(d.accepted == (fmin.value < -1e-9));
        if (d.accepted) {
          CHECK(d.tau == doctest::Approx(std::sqrt(d.mu)));
          CHECK(d.descent_value < 0.0);
          CHECK(d.descent_value == doctest::Approx(f(d.tau)));
        } else {
          CHECK(d.tau == 0.0);
        }
      }
    }
  }
}

TEST_CASE("threshold helpers invert each other and bracket acceptance") {
  for (double p : {0.2, 0.5, 0.8, 1.0}) {
    for (double lambda : {0.3, 2.0, 40.0}) {
      const double s = escape_sigma_threshold(lambda, p);
      CHECK(lambda_for_sigma_threshold(s, p) == doctest::Approx(lambda));
      CHECK(decide_escape(s * 1.001, lambda, p).accepted);
      CHECK_FALSE(decide_escape(s * 0.999, lambda, p).accepted);
    }
  }
}

TEST_CASE("attempt_escape on a fully observed residual realizes the model exactly") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const ObservedMatrix y = full_observation(oracle::gaussian(8, 6, rng, 2.0));
    const Factors f = oracle::random_factors(8, 6, 2, rng, 0.5);
    SolverConfig cfg;
    cfg.p = 0.3 + 0.05 * trial;
    cfg.lambda = 0.2;
    const EscapeResult r = attempt_escape(y, f, cfg);
    REQUIRE(r.decision.accepted);
    CHECK_FALSE(r.decision.rolled_back);
    CHECK(r.factors.width() == 3);
    CHECK(std::abs(r.decision.realized_change - r.decision.descent_value) < 1e-9);
    CHECK(objective(y, r.factors, cfg) < objective(y, f, cfg));
    // Balanced appended column.
    CHECK(r.factors.u.col(2).norm() == doctest::Approx(r.decision.tau));
    CHECK(r.factors.v.col(2).norm() == doctest::Approx(r.decision.tau));
    const DenseMatrix resid = adjoint_embed(masked_residual(y, f));
    CHECK(r.decision.sigma == doctest::Approx(full_svd(resid).s(0)).epsilon(1e-8));
  }
}

TEST_CASE("attempt_escape leaves an exact fit alone") {
  Rng rng(2);
  const Factors f = oracle::random_factors(5, 5, 2, rng);
  const ObservedMatrix y = full_observation(f.product());
  SolverConfig cfg;
  cfg.lambda = 1.0;
  const EscapeResult r = attempt_escape(y, f, cfg);
  CHECK_FALSE(r.decision.accepted);
  CHECK(r.factors.u == f.u);
  CHECK(r.factors.v == f.v);
}

TEST_CASE("attempt_escape replaces an empty model") {
  Rng rng(3);
  const ObservedMatrix y = full_observation(oracle::gaussian(4, 4, rng, 3.0));
  SolverConfig cfg;
  cfg.lambda = 0.5;
  const EscapeResult r = attempt_escape(y, Factors::zeros(4, 4, 1), cfg);
  REQUIRE(r.decision.accepted);
  CHECK(r.factors.width() == 1);
  CHECK_FALSE(is_empty_model(r.factors));
}

TEST_CASE("masked residual: realized descent within the RIP-gap bound") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec spec;
    spec.m = 20;
    spec.n = 16;
    spec.rank = 3;
    spec.snr_db = 20;
    spec.missing_rate = 0.4;
    spec.seed = seed;
    const GroundTruth gt = gen_synthetic(spec);
    Rng rng(seed);
    const Factors f = oracle::random_factors(20, 16, 1, rng, 0.5);
    SolverConfig cfg;
    cfg.p = 0.5;
    cfg.lambda = 1.0;
    const EscapeResult r = attempt_escape(gt.observed, f, cfg);
    REQUIRE(r.decision.accepted);
    CHECK_FALSE(r.decision.rolled_back);
    const double tau = r.decision.tau;
    const Vector u = r.factors.u.col(1) / tau;
    const Vector v = r.factors.v.col(1) / tau;
    const DenseMatrix rank_one = u * v.transpose();
    const double masked_norm = mask(gt.observed, rank_one).frobenius_norm();
    const double delta = std::abs(masked_norm - 1.0);
    const double gap = std::abs(r.decision.realized_change - r.decision.descent_value);
    const double mu2 = r.decision.mu * r.decision.mu;
    CHECK(gap <= 0.5 * mu2 * delta * (1.0 + masked_norm) + 1e-9 * mu2);
    CHECK(gap <= mu2 * delta + 1e-9 * mu2);
    // Masking shrinks the quadratic term, so the realized descent is larger.
    CHECK(r.decision.realized_change <= r.decision.descent_value + 1e-9);
  }
}

}  // namespace
}  // namespace varsp
