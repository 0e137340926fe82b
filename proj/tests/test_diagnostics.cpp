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
#include "varsp/diagnostics.hpp"
#include "varsp/experiments.hpp"

namespace varsp {
namespace {

ObservedMatrix full_observation(const DenseMatrix& x) {
  std::vector<Entry> e;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) e.push_back({i, j, x(i, j)});
  return ObservedMatrix(x.rows(), x.cols(), std::move(e));
}

using oracle::Constructed;
using oracle::construct;

TEST_CASE("subgradient check on diag(4, 1)") {
  DenseMatrix x(2, 2);
  x << 4, 0, 0, 1;
  DenseMatrix g(2, 2);
  g << 0.25, 0, 0, 0.5;
  const SubgradientCheck ok = x_space_subgradient_check(x, g, PExponent(0.5));
  CHECK(ok.member);
  CHECK(ok.rank == 2);
  CHECK(ok.diag_residual < 1e-12);

  DenseMatrix bad = g;
  bad(0, 1) += 0.1;  // 0.1 u1 v2^T
  const SubgradientCheck no = x_space_subgradient_check(x, bad, PExponent(0.5));
  CHECK_FALSE(no.member);
  CHECK(no.offdiag_residual == doctest::Approx(0.1));
}

TEST_CASE("complement component is unconstrained in size") {
  Rng rng(1);
  for (double scale : {0.0, 1.0, 30.0}) {
    const Constructed c = construct({5.0, 2.0, 0.5}, 7, 6, 0.4, scale, rng);
    const SubgradientCheck chk = x_space_subgradient_check(c.x, c.g, PExponent(0.4));
    CHECK(chk.member);
    CHECK(chk.rank == 3);
  }
}

TEST_CASE("cross-block perturbations are detected") {
  Rng rng(2);
  const Constructed c = construct({3.0, 1.0}, 5, 4, 0.5, 1.0, rng);
  // Row space of X times a column-space complement direction.
  const DenseMatrix cross = 1e-3 * c.p_basis.col(0) * c.q_basis.col(3).transpose();
  const SubgradientCheck chk =
      x_space_subgradient_check(c.x, c.g + cross, PExponent(0.5));
  CHECK_FALSE(chk.member);
  CHECK(chk.offdiag_residual == doctest::Approx(1e-3).epsilon(1e-6));
  // Wrong diagonal value.
  const DenseMatrix diag = 1e-3 * c.p_basis.col(1) * c.q_basis.col(1).transpose();
  CHECK_FALSE(x_space_subgradient_check(c.x, c.g + diag, PExponent(0.5)).member);
}

TEST_CASE("membership does not depend on the basis chosen inside a tie") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    // sigma_1 = sigma_2: any rotation of the first two columns is an SVD.
    Constructed c = construct({2.0, 2.0, 0.7}, 6, 5, 0.5, 2.0, rng);
    const double angle = 0.3 + trial;
    DenseMatrix rot = DenseMatrix::Identity(2, 2);
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const DenseMatrix p2 = c.p_basis.leftCols(2) * rot;
    const DenseMatrix q2 = c.q_basis.leftCols(2) * rot;
    CHECK((p2 * 2.0 * q2.transpose() -
           c.p_basis.leftCols(2) * 2.0 * c.q_basis.leftCols(2).transpose())
              .norm() < 1e-12);
    const SubgradientCheck chk = x_space_subgradient_check(c.x, c.g, PExponent(0.5));
    CHECK(chk.member);
  }
}

TEST_CASE("subgradient check argument errors") {
  CHECK_THROWS_AS(x_space_subgradient_check(DenseMatrix::Ones(2, 2),
                                            DenseMatrix::Ones(2, 3), PExponent(0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(x_space_subgradient_check(DenseMatrix::Zero(2, 2),
                                            DenseMatrix::Ones(2, 2), PExponent(0.5)),
                  std::invalid_argument);
}

TEST_CASE("theorem2_gap") {
  Rng rng(4);
  const DenseMatrix x = oracle::gaussian(6, 3, rng) * oracle::gaussian(5, 3, rng).transpose();
  const Factors bal = balanced_factorization(x, 4);
  CHECK(std::abs(theorem2_gap(bal, PExponent(0.5))) <= 1e-8);

  Factors skew = bal;
  skew.u *= 2.0;
  skew.v /= 2.0;
  CHECK(theorem2_gap(skew, PExponent(0.5)) > 1e-3);
  CHECK(theorem2_gap(Factors::zeros(3, 3, 2), PExponent(0.5)) == 0.0);

  for (int trial = 0; trial < 30; ++trial) {
    const Factors f = oracle::random_factors(5, 4, 3, rng);
    CHECK(theorem2_gap(f, PExponent(0.2 + 0.02 * trial)) >= -1e-10);
  }
}

TEST_CASE("factorized stationarity") {
  Rng rng(5);
  const Factors f = oracle::random_factors(5, 4, 2, rng);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  const StationarityReport exact =
      factorized_stationarity(full_observation(f.product()), f, cfg);
  CHECK(exact.grad_norm_u < 1e-12);
  CHECK(exact.grad_norm_v < 1e-12);
  CHECK(exact.width == 2);

  cfg.lambda = 0.3;
  const ObservedMatrix y = full_observation(oracle::gaussian(5, 4, rng));
  for (int trial = 0; trial < 10; ++trial) {
    const StationarityReport r =
        factorized_stationarity(y, oracle::random_factors(5, 4, 2, rng), cfg);
    CHECK(r.grad_norm_u > 0.0);
    CHECK(r.grad_norm_v > 0.0);
  }
}

TEST_CASE("solver output: gradients shrink with the tolerance, re-balancing closes the gap") {
  SynthSpec spec;
  spec.m = 40;
  spec.n = 30;
  spec.rank = 3;
  spec.snr_db = 15;
  spec.missing_rate = 0.3;
  spec.seed = 8;
  const GroundTruth gt = gen_synthetic(spec);
  SolverConfig cfg;
  cfg.p = 0.5;
  cfg.lambda = 6.0;
  cfg.init_width = 6;
  cfg.seed = 2;
  const SolveResult loose = solve(gt.observed, cfg);
  REQUIRE(loose.report.converged);
  CHECK(loose.report.final_width == 3);
  const StationarityReport st = stationarity_report(gt.observed, loose.factors, cfg);
  MESSAGE("conv_tol 1e-4: grad norms " << st.grad_norm_u << ", " << st.grad_norm_v
          << "; x-space residuals " << st.x_space_diag_residual << ", "
          << st.offdiag_residual);
  // Measured band at the default tolerance (about 0.06 and 0.02 here).
  CHECK(st.grad_norm_u <= 0.1);
  CHECK(st.grad_norm_v <= 0.1);

  SolverConfig tight = cfg;
  tight.conv_tol = 1e-6;
  tight.max_iter = 100000;
  const SolveResult fine = solve(gt.observed, tight);
  const StationarityReport st2 = factorized_stationarity(gt.observed, fine.factors, tight);
  MESSAGE("conv_tol 1e-6: grad norms " << st2.grad_norm_u << ", " << st2.grad_norm_v);
  CHECK(st2.grad_norm_u * 5.0 <= st.grad_norm_u);
  CHECK(st2.grad_norm_v * 5.0 <= st.grad_norm_v);

  const Factors rebalanced =
      balanced_factorization(loose.factors.product(), loose.factors.width());
  CHECK(std::abs(theorem2_gap(rebalanced, PExponent(cfg.p))) <= 1e-8);
  CHECK(objective(gt.observed, rebalanced, cfg) <=
        objective(gt.observed, loose.factors, cfg) + 1e-9);
}

}  // namespace
}  // namespace varsp
