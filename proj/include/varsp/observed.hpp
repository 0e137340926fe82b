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

#ifndef VARSP_OBSERVED_HPP_
#define VARSP_OBSERVED_HPP_

#include <span>
#include <vector>

#include "varsp/factors.hpp"
#include "varsp/spectral.hpp"

namespace varsp {

struct Entry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Values of an m x n matrix on an index set Z. Entries are kept sorted by
// (row, col); a CSR-style row offset table and a column-major permutation give
// O(1) access to the entries of any row or column.
class ObservedMatrix {
 public:
  ObservedMatrix() = default;
  // Sorts the entries. Throws std::invalid_argument on out-of-range indices,
  // duplicate (row, col) pairs or non-finite values.
  ObservedMatrix(Index rows, Index cols, std::vector<Entry> entries);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::span<const Entry> entries() const { return entries_; }
  std::span<const Entry> row(Index i) const;
  // Positions into entries() of the entries in column j.
  std::span<const std::size_t> col_positions(Index j) const;

  // Same index set, new values (in entries() order).
  ObservedMatrix with_values(std::span<const double> values) const;

  double frobenius_norm() const;
  double min_value() const;
  double max_value() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_offsets_;
  std::vector<std::size_t> col_order_;
};

struct MaskSplit {
  ObservedMatrix train;
  ObservedMatrix test;
};

// u^i . v^j for every observed (i, j), in entries() order.
std::vector<double> predict(const ObservedMatrix& y, const Factors& f);

// P_Z(Y - U V^T) as a triplet set. O(|Z| d).
ObservedMatrix masked_residual(const ObservedMatrix& y, const Factors& f);

// Dense matrix equal to r on Z and zero elsewhere: the adjoint of the mask.
DenseMatrix adjoint_embed(const ObservedMatrix& r);

// P_Z(X): the values of a dense matrix on the index set of `pattern`.
ObservedMatrix mask(const ObservedMatrix& pattern, const DenseMatrix& x);

// 1/2 |P_Z(Y - U V^T)|_F^2.
double loss_value(const ObservedMatrix& y, const Factors& f);

// Sum of products of values on the shared index set; both must have the same
// shape and index set.
double inner(const ObservedMatrix& a, const ObservedMatrix& b);

}  // namespace varsp

#endif  // VARSP_OBSERVED_HPP_
