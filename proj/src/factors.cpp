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

#include "varsp/factors.hpp"

#include <stdexcept>

namespace varsp {

Factors::Factors(DenseMatrix u_in, DenseMatrix v_in)
    : u(std::move(u_in)), v(std::move(v_in)) {
  if (u.cols() != v.cols()) {
    throw std::invalid_argument("Factors: U and V have different widths");
  }
  if (u.cols() < 1) throw std::invalid_argument("Factors: width must be >= 1");
  require_finite(u, "Factors U");
  require_finite(v, "Factors V");
}

Factors Factors::zeros(Index m, Index n, Index d) {
  return Factors(DenseMatrix::Zero(m, d), DenseMatrix::Zero(n, d));
}

Vector Factors::column_energy() const {
  return 0.5 * (u.colwise().squaredNorm() + v.colwise().squaredNorm())
                   .transpose();
}

}  // namespace varsp
