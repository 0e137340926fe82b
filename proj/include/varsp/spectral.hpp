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

#ifndef VARSP_SPECTRAL_HPP_
#define VARSP_SPECTRAL_HPP_

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace varsp {

using Index = Eigen::Index;

// Row-major so that factor rows u^i, v^j are contiguous in the solver sweeps.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Throws std::invalid_argument naming `what` if any entry is NaN or Inf.
void require_finite(const DenseMatrix& x, std::string_view what);

struct SvdResult {
  DenseMatrix u;  // m x k, orthonormal columns
  Vector s;       // k = min(m, n), descending, nonnegative
  DenseMatrix v;  // n x k, orthonormal columns
};

// Thin SVD, X = U diag(s) V^T. The first nonzero entry of every left singular
// vector is made nonnegative (the matching right vector flips with it).
SvdResult full_svd(const DenseMatrix& x);

struct SpectralTriple {
  double sigma = 0.0;
  Vector u;
  Vector v;
  int iterations = 0;
  bool converged = false;
};

// Dominant singular triple by alternating power iteration
//   v <- X^T u / |X^T u|,  u <- X v / |X v|
// started from a fixed seeded unit vector. Stops once the relative change in
// sigma falls below tol; after max_iter the best iterate is returned with
// converged = false.
SpectralTriple top_singular_pair(const DenseMatrix& x, double tol = 1e-10,
                                 int max_iter = 5000,
                                 std::uint64_t seed = 0x5eed5eedULL);

// Number of singular values above rel_tol * s[0].
Index numerical_rank(const Vector& s, double rel_tol = 1e-12);

}  // namespace varsp

#endif  // VARSP_SPECTRAL_HPP_
