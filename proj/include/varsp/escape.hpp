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

#ifndef VARSP_ESCAPE_HPP_
#define VARSP_ESCAPE_HPP_

#include "varsp/factors.hpp"
#include "varsp/observed.hpp"
#include "varsp/solver.hpp"

namespace varsp {

struct EscapeDecision {
  double sigma = 0.0;  // top singular value of A*(R)
  double mu = 0.0;
  double tau = 0.0;
  // Predicted objective change -tau^2 sigma + tau^4 / 2 + lambda tau^(2p)
  // under an isometric operator.
  double descent_value = 0.0;
  bool accepted = false;
  // Accepted by the closed form but the appended column did not decrease the
  // true objective, so it was rolled back.
  bool rolled_back = false;
  // Realized objective change, set by attempt() when a column was tried.
  double realized_change = 0.0;
};

// Closed-form rank-one step for a residual with top singular value sigma:
//   mu = (2 - 2p) / (2 - p) * sigma,
//   accept iff lambda - mu^(1-p) sigma + mu^(2-p) / 2 <= 0, tau = sqrt(mu).
// At p = 1 the nuclear-norm rule is used instead: accept iff sigma > lambda,
// tau^2 = sigma - lambda.
EscapeDecision decide_escape(double sigma, double lambda, double p);

// Runs top_singular_pair on the dense residual and then decide_escape.
EscapeDecision escape_decision(const DenseMatrix& residual, double lambda,
                               double p);

// The smallest top singular value of A*(R) for which decide_escape accepts,
//   ((2 - p) lambda / k^(1-p))^(1/(2-p)),  k = (2 - 2p) / (2 - p),
// and its inverse. Both reduce to the identity at p = 1.
double escape_sigma_threshold(double lambda, double p);
double lambda_for_sigma_threshold(double sigma, double p);

struct EscapeResult {
  Factors factors;
  EscapeDecision decision;
};

// Appends (tau u, tau v) built from the top singular pair of
// adjoint_embed(masked_residual(y, f)) when the closed form accepts and the
// objective decreases numerically; otherwise returns f unchanged. An empty
// model (see is_empty_model) is replaced rather than extended.
EscapeResult attempt_escape(const ObservedMatrix& y, const Factors& f,
                            const SolverConfig& cfg);

}  // namespace varsp

#endif  // VARSP_ESCAPE_HPP_
