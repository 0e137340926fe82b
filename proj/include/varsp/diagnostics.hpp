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

#ifndef VARSP_DIAGNOSTICS_HPP_
#define VARSP_DIAGNOSTICS_HPP_

#include <optional>

#include "varsp/factors.hpp"
#include "varsp/observed.hpp"
#include "varsp/schatten.hpp"
#include "varsp/solver.hpp"

namespace varsp {

struct SubgradientCheck {
  bool member = false;
  // max_i |(U^T G V)_ii - p sigma_i^(p-1)|
  double diag_residual = 0.0;
  // Off-diagonal part of U^T G V (ties exempt) together with U^T G (I - VV^T)
  // and (I - UU^T) G V, in Frobenius norm.
  double offdiag_residual = 0.0;
  Index rank = 0;
};

// Tests whether G is a regular subgradient of |X|_Sp^p at X: in the singular
// bases of X it must be diag(p sigma_i^(p-1)) on the row/column spaces, zero
// on the two cross blocks, and is free on the doubly orthogonal complement.
// tol is absolute; when unset, 1e-6 * max(1, |G|_F) is used.
SubgradientCheck x_space_subgradient_check(const DenseMatrix& x,
                                           const DenseMatrix& g, PExponent p,
                                           std::optional<double> tol = {});

struct StationarityReport {
  double grad_norm_u = 0.0;
  double grad_norm_v = 0.0;
  // Residuals of the X-space check with G = A*(R) / lambda; zero when the
  // model is empty or lambda = 0.
  double x_space_diag_residual = 0.0;
  double offdiag_residual = 0.0;
  Index width = 0;
};

// Gradient norms scaled by max(1, |U|_F) and max(1, |V|_F).
StationarityReport factorized_stationarity(const ObservedMatrix& y,
                                           const Factors& f,
                                           const SolverConfig& cfg);

// factorized_stationarity plus the X-space residuals at X = U V^T.
StationarityReport stationarity_report(const ObservedMatrix& y,
                                       const Factors& f,
                                       const SolverConfig& cfg);

// variational_sum(F) - schatten_p_power(U V^T); nonnegative, and zero exactly
// for factorizations that attain the variational minimum.
double theorem2_gap(const Factors& f, PExponent p);

}  // namespace varsp

#endif  // VARSP_DIAGNOSTICS_HPP_
