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

#ifndef VARSP_SOLVER_HPP_
#define VARSP_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "varsp/factors.hpp"
#include "varsp/observed.hpp"
#include "varsp/schatten.hpp"

namespace varsp {

struct SolverConfig {
  double p = 0.5;
  double lambda = 1.0;
  Index init_width = 10;
  double prune_thres = 1e-5;
  int max_iter = 1000;
  double conv_tol = 1e-4;
  bool escape_enabled = false;
  // Budget of successful rank-one escapes per solve; unset means init_width.
  std::optional<int> escape_check_max;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument describing the first bad field.
  void validate() const;
  int escape_budget() const {
    return escape_check_max.value_or(static_cast<int>(init_width));
  }
};

struct EscapeEvent {
  int iter = 0;
  double sigma = 0.0;
  double tau = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

struct SolveReport {
  Index final_width = 0;
  std::vector<double> objective_trace;
  // Indices into objective_trace at which an escape column was appended.
  std::vector<std::size_t> escape_trace_index;
  std::vector<EscapeEvent> escape_events;
  int iters = 0;
  bool converged = false;
  int escapes = 0;
  // Accepted escapes that failed the numerical descent check.
  int rollbacks = 0;
  double last_rel_change = 0.0;
};

// Objective with the regularizer in its exact variational form:
//   1/2 |P_Z(Y - U V^T)|_F^2 + lambda * sum_i c_i^p,
//   c_i = (|u_i|^2 + |v_i|^2) / 2.
double objective(const ObservedMatrix& y, const Factors& f,
                 const SolverConfig& cfg);

// Diagonal of W, w_i = p c_i^(p-1). Throws std::domain_error if some c_i = 0.
Vector reweighting(const Factors& f, double p);

// -A*(R) V + lambda U W
DenseMatrix grad_u(const ObservedMatrix& y, const Factors& f,
                   const SolverConfig& cfg);
// -A*(R)^T U + lambda V W
DenseMatrix grad_v(const ObservedMatrix& y, const Factors& f,
                   const SolverConfig& cfg);

// V^T V + lambda W (d x d). Every row's masked Gram matrix is bounded above by
// V^T V, which makes the induced quadratic a global majorizer in U. Throws
// std::domain_error when the smallest eigenvalue is below 1e-12 * trace.
DenseMatrix surrogate_hessian_u(const Factors& f, const SolverConfig& cfg);
// U^T U + lambda W
DenseMatrix surrogate_hessian_v(const Factors& f, const SolverConfig& cfg);

// One Gauss-Seidel sweep: U <- U - grad_u H_U^-1, then V <- V - grad_v H_V^-1
// evaluated at the updated U.
Factors bsum_step(const ObservedMatrix& y, const Factors& f,
                  const SolverConfig& cfg);

// Drops every column with |u_i| <= thres or |v_i| <= thres. If nothing would
// survive, a single zero column is kept so the width stays >= 1.
Factors prune(const Factors& f, double thres);

// True for the single zero column prune() leaves behind.
bool is_empty_model(const Factors& f);

// Gaussian factors of width init_width whose product has roughly the
// Frobenius norm of the full matrix implied by the observations.
Factors random_init(const ObservedMatrix& y, const SolverConfig& cfg);

// |U1 V1^T - U0 V0^T|_F / |U0 V0^T|_F computed from d x d Gram products,
// without forming either m x n matrix. The denominator is replaced by 1 when
// the previous model is zero.
double relative_change(const Factors& prev, const Factors& next);

struct SolveResult {
  Factors factors;
  SolveReport report;
};

SolveResult solve(const ObservedMatrix& y, const SolverConfig& cfg);
SolveResult solve(const ObservedMatrix& y, const SolverConfig& cfg,
                  Factors init);

}  // namespace varsp

#endif  // VARSP_SOLVER_HPP_
