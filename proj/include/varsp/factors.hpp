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

#ifndef VARSP_FACTORS_HPP_
#define VARSP_FACTORS_HPP_

#include "varsp/spectral.hpp"

namespace varsp {

// X = U V^T with U: m x d and V: n x d. Column i of both is the i-th
// rank-one component u_i v_i^T.
struct Factors {
  DenseMatrix u;
  DenseMatrix v;

  Factors() = default;
  Factors(DenseMatrix u_in, DenseMatrix v_in);  // validates shapes, finiteness

  static Factors zeros(Index m, Index n, Index d);

  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }
  Index width() const { return u.cols(); }

  DenseMatrix product() const { return u * v.transpose(); }

  // c_i = (|u_i|^2 + |v_i|^2) / 2 for every column.
  Vector column_energy() const;
};

}  // namespace varsp

#endif  // VARSP_FACTORS_HPP_
