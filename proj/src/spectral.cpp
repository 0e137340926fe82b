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

#include "varsp/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "varsp/random.hpp"

namespace varsp {

void require_finite(const DenseMatrix& x, std::string_view what) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": matrix contains NaN or Inf entries");
  }
}

SvdResult full_svd(const DenseMatrix& x) {
  require_finite(x, "full_svd");
  const Index k = std::min(x.rows(), x.cols());
  SvdResult out;
  if (k == 0) {
    out.u = DenseMatrix(x.rows(), 0);
    out.v = DenseMatrix(x.cols(), 0);
    out.s = Vector(0);
    return out;
  }
  // Column-major copy: JacobiSVD is fastest and most accurate this way.
  const Eigen::MatrixXd a = x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.s = svd.singularValues();

  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < out.u.rows(); ++r) {
      const double e = out.u(r, c);
      if (e != 0.0) {
        if (e < 0.0) {
          out.u.col(c) *= -1.0;
          out.v.col(c) *= -1.0;
        }
        break;
      }
    }
  }
  return out;
}

namespace {

double normalize(Vector& v) {
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return n;
}

}  // namespace

SpectralTriple top_singular_pair(const DenseMatrix& x, double tol,
                                 int max_iter, std::uint64_t seed) {
  require_finite(x, "top_singular_pair");
  if (!(tol > 0.0)) throw std::invalid_argument("top_singular_pair: tol <= 0");

  SpectralTriple best;
  best.u = Vector::Zero(x.rows());
  best.v = Vector::Zero(x.cols());
  if (x.rows() > 0) best.u(0) = 1.0;
  if (x.cols() > 0) best.v(0) = 1.0;
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    best.converged = true;
    return best;
  }

  Rng rng(seed);
  Vector u(x.rows());
  for (Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
  normalize(u);
  Vector v(x.cols());

  double sigma = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    v.noalias() = x.transpose() * u;
    if (normalize(v) == 0.0) {
      // Start vector orthogonal to the range: restart from a new draw.
      for (Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
      normalize(u);
      continue;
    }
    u.noalias() = x * v;
    const double next = normalize(u);
    best.iterations = it;
    if (next >= best.sigma) {
      best.sigma = next;
      best.u = u;
      best.v = v;
    }
    if (std::abs(next - sigma) <= tol * next) {
      best.converged = true;
      break;
    }
    sigma = next;
  }
  return best;
}

Index numerical_rank(const Vector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cut = rel_tol * s(0);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

}  // namespace varsp
