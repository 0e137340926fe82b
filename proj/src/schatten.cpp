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

#include "varsp/schatten.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace varsp {

PExponent::PExponent(double p) : p_(p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in (0, 1], got " +
                                std::to_string(p));
  }
}

double schatten_p_power(const DenseMatrix& x, PExponent p) {
  const Vector s = full_svd(x).s;
  const Index r = numerical_rank(s, kRankThreshold);
  double total = 0.0;
  for (Index i = 0; i < r; ++i) total += std::pow(s(i), p.value());
  return total;
}

double variational_product(const Factors& f, PExponent p) {
  const Vector un = f.u.colwise().norm().transpose();
  const Vector vn = f.v.colwise().norm().transpose();
  double total = 0.0;
  for (Index i = 0; i < un.size(); ++i) {
    total += std::pow(un(i), p.value()) * std::pow(vn(i), p.value());
  }
  return total;
}

double variational_sum(const Factors& f, PExponent p) {
  const Vector c = f.column_energy();
  double total = 0.0;
  for (Index i = 0; i < c.size(); ++i) {
    if (c(i) > 0.0) total += std::pow(c(i), p.value());
  }
  return total;
}

Factors balanced_factorization(const DenseMatrix& x, Index d) {
  if (d < 1) throw std::invalid_argument("balanced_factorization: d < 1");
  const SvdResult svd = full_svd(x);
  const Index r = numerical_rank(svd.s, kRankThreshold);
  if (d < r) {
    throw std::invalid_argument(
        "balanced_factorization: width " + std::to_string(d) +
        " is below the numerical rank " + std::to_string(r));
  }
  Factors f = Factors::zeros(x.rows(), x.cols(), d);
  for (Index i = 0; i < r; ++i) {
    const double root = std::sqrt(svd.s(i));
    f.u.col(i) = svd.u.col(i) * root;
    f.v.col(i) = svd.v.col(i) * root;
  }
  return f;
}

}  // namespace varsp
