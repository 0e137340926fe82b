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

#include "varsp/escape.hpp"

#include <cmath>
#include <stdexcept>

namespace varsp {

EscapeDecision decide_escape(double sigma, double lambda, double p) {
  (void)PExponent(p);
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument("decide_escape: sigma must be finite and >= 0");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("decide_escape: lambda must be >= 0");
  }
  EscapeDecision d;
  d.sigma = sigma;
  d.mu = (2.0 - 2.0 * p) / (2.0 - p) * sigma;
  if (sigma == 0.0) return d;

  if (p == 1.0) {
    // Nuclear norm: the scaled objective is linear in tau^2.
    if (sigma > lambda) {
      d.accepted = true;
      d.tau = std::sqrt(sigma - lambda);
    }
  } else if (lambda - std::pow(d.mu, 1.0 - p) * sigma +
                 0.5 * std::pow(d.mu, 2.0 - p) <=
             0.0) {
    d.accepted = true;
    d.tau = std::sqrt(d.mu);
  }
  if (d.accepted) {
    const double t2 = d.tau * d.tau;
    d.descent_value =
        -t2 * sigma + 0.5 * t2 * t2 + lambda * std::pow(t2, p);
  }
  return d;
}

EscapeDecision escape_decision(const DenseMatrix& residual, double lambda,
                               double p) {
  require_finite(residual, "escape_decision");
  return decide_escape(top_singular_pair(residual).sigma, lambda, p);
}

double escape_sigma_threshold(double lambda, double p) {
  (void)PExponent(p);
  if (p == 1.0) return lambda;
  const double k = (2.0 - 2.0 * p) / (2.0 - p);
  return std::pow((2.0 - p) * lambda / std::pow(k, 1.0 - p), 1.0 / (2.0 - p));
}

double lambda_for_sigma_threshold(double sigma, double p) {
  (void)PExponent(p);
  if (p == 1.0) return sigma;
  const double k = (2.0 - 2.0 * p) / (2.0 - p);
  return std::pow(sigma, 2.0 - p) * std::pow(k, 1.0 - p) / (2.0 - p);
}

EscapeResult attempt_escape(const ObservedMatrix& y, const Factors& f,
                            const SolverConfig& cfg) {
  const DenseMatrix residual = adjoint_embed(masked_residual(y, f));
  const SpectralTriple top = top_singular_pair(residual);
  EscapeResult out{f, decide_escape(top.sigma, cfg.lambda, cfg.p)};
  if (!out.decision.accepted) return out;

  const double tau = out.decision.tau;
  Factors grown;
  if (is_empty_model(f)) {
    grown = Factors(DenseMatrix(tau * top.u), DenseMatrix(tau * top.v));
  } else {
    grown = Factors::zeros(f.rows(), f.cols(), f.width() + 1);
    grown.u.leftCols(f.width()) = f.u;
    grown.v.leftCols(f.width()) = f.v;
    grown.u.col(f.width()) = tau * top.u;
    grown.v.col(f.width()) = tau * top.v;
  }

  const double before = objective(y, f, cfg);
  const double after = objective(y, grown, cfg);
  out.decision.realized_change = after - before;
  // Masking can only shrink |A(u v^T)|, so the realized change never exceeds
  // the isometric prediction beyond round-off.
  const double slack = 1e-8 * std::max(1.0, std::abs(before));
  if (!(after < before) ||
      out.decision.realized_change > out.decision.descent_value + slack) {
    out.decision.rolled_back = true;
    return out;
  }
  out.factors = std::move(grown);
  return out;
}

}  // namespace varsp
