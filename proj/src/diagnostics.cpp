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

#include "varsp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace varsp {

SubgradientCheck x_space_subgradient_check(const DenseMatrix& x,
                                           const DenseMatrix& g, PExponent p,
                                           std::optional<double> tol) {
  if (x.rows() != g.rows() || x.cols() != g.cols()) {
    throw std::invalid_argument("x_space_subgradient_check: shape mismatch");
  }
  require_finite(g, "x_space_subgradient_check G");
  const SvdResult svd = full_svd(x);
  const Index r = numerical_rank(svd.s, kRankThreshold);
  if (r == 0) {
    throw std::invalid_argument("x_space_subgradient_check: X is zero");
  }
  const auto ur = svd.u.leftCols(r);
  const auto vr = svd.v.leftCols(r);
  const DenseMatrix core = ur.transpose() * g * vr;

  SubgradientCheck out;
  out.rank = r;
  // Singular values this close are treated as one cluster whose basis is
  // only defined up to rotation.
  const double tie = 1e-8 * svd.s(0);
  double off2 = 0.0;
  for (Index i = 0; i < r; ++i) {
    const double want = p.value() * std::pow(svd.s(i), p.value() - 1.0);
    out.diag_residual = std::max(out.diag_residual, std::abs(core(i, i) - want));
    for (Index j = 0; j < r; ++j) {
      if (i == j || std::abs(svd.s(i) - svd.s(j)) <= tie) continue;
      off2 += core(i, j) * core(i, j);
    }
  }
  const DenseMatrix row_cross = ur.transpose() * g - core * vr.transpose();
  const DenseMatrix col_cross = g * vr - ur * core;
  out.offdiag_residual = std::sqrt(off2 + row_cross.squaredNorm() +
                                   col_cross.squaredNorm());

  const double limit = tol.value_or(1e-6 * std::max(1.0, g.norm()));
  out.member = out.diag_residual <= limit && out.offdiag_residual <= limit;
  return out;
}

StationarityReport factorized_stationarity(const ObservedMatrix& y,
                                           const Factors& f,
                                           const SolverConfig& cfg) {
  StationarityReport rep;
  rep.width = f.width();
  rep.grad_norm_u = grad_u(y, f, cfg).norm() / std::max(1.0, f.u.norm());
  rep.grad_norm_v = grad_v(y, f, cfg).norm() / std::max(1.0, f.v.norm());
  return rep;
}

StationarityReport stationarity_report(const ObservedMatrix& y,
                                       const Factors& f,
                                       const SolverConfig& cfg) {
  StationarityReport rep = factorized_stationarity(y, f, cfg);
  if (cfg.lambda > 0.0 && !is_empty_model(f)) {
    const DenseMatrix x = f.product();
    if (x.cwiseAbs().maxCoeff() > 0.0) {
      const DenseMatrix g = adjoint_embed(masked_residual(y, f)) / cfg.lambda;
      const SubgradientCheck chk =
          x_space_subgradient_check(x, g, PExponent(cfg.p));
      rep.x_space_diag_residual = chk.diag_residual;
      rep.offdiag_residual = chk.offdiag_residual;
    }
  }
  return rep;
}

double theorem2_gap(const Factors& f, PExponent p) {
  return variational_sum(f, p) - schatten_p_power(f.product(), p);
}

}  // namespace varsp
