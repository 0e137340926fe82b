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

#ifndef VARSP_SCHATTEN_HPP_
#define VARSP_SCHATTEN_HPP_

#include "varsp/factors.hpp"
#include "varsp/spectral.hpp"

namespace varsp {

// Exponent of the Schatten quasi-norm, 0 < p <= 1.
class PExponent {
 public:
  explicit PExponent(double p);  // throws std::invalid_argument outside (0, 1]
  double value() const { return p_; }
  operator double() const { return p_; }  // NOLINT: used in arithmetic

 private:
  double p_;
};

// Singular values below this fraction of sigma_1 count as zero.
inline constexpr double kRankThreshold = 1e-12;

// |X|_Sp^p = sum of sigma_i^p over the positive singular values.
double schatten_p_power(const DenseMatrix& x, PExponent p);

// sum_i |u_i|^p |v_i|^p
double variational_product(const Factors& f, PExponent p);

// sum_i ((|u_i|^2 + |v_i|^2) / 2)^p
//
// Both forms upper-bound schatten_p_power(U V^T, p), with
//   schatten <= product <= sum,
// and the minimum over all factorizations of X is attained by the balanced
// factors below.
double variational_sum(const Factors& f, PExponent p);

// U = U_X S^(1/2), V = V_X S^(1/2) from the SVD of X, padded with zero columns
// up to width d. Throws std::invalid_argument if d is below the numerical rank
// of X or d < 1.
Factors balanced_factorization(const DenseMatrix& x, Index d);

}  // namespace varsp

#endif  // VARSP_SCHATTEN_HPP_
