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

#include "varsp/observed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace varsp {

ObservedMatrix::ObservedMatrix(Index rows, Index cols,
                               std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ < 0 || cols_ < 0) {
    throw std::invalid_argument("ObservedMatrix: negative shape");
  }
  for (const Entry& e : entries_) {
    if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_) {
      throw std::invalid_argument(
          "ObservedMatrix: index (" + std::to_string(e.row) + ", " +
          std::to_string(e.col) + ") out of range for shape " +
          std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("ObservedMatrix: non-finite value at (" +
                                  std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ")");
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row &&
        entries_[k].col == entries_[k - 1].col) {
      throw std::invalid_argument("ObservedMatrix: duplicate entry (" +
                                  std::to_string(entries_[k].row) + ", " +
                                  std::to_string(entries_[k].col) + ")");
    }
  }

  row_offsets_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  col_offsets_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (const Entry& e : entries_) {
    ++row_offsets_[static_cast<std::size_t>(e.row) + 1];
    ++col_offsets_[static_cast<std::size_t>(e.col) + 1];
  }
  std::partial_sum(row_offsets_.begin(), row_offsets_.end(),
                   row_offsets_.begin());
  std::partial_sum(col_offsets_.begin(), col_offsets_.end(),
                   col_offsets_.begin());

  col_order_.resize(entries_.size());
  std::vector<std::size_t> fill(col_offsets_.begin(), col_offsets_.end() - 1);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    col_order_[fill[static_cast<std::size_t>(entries_[k].col)]++] = k;
  }
}

std::span<const Entry> ObservedMatrix::row(Index i) const {
  const auto b = row_offsets_[static_cast<std::size_t>(i)];
  const auto e = row_offsets_[static_cast<std::size_t>(i) + 1];
  return std::span<const Entry>(entries_).subspan(b, e - b);
}

std::span<const std::size_t> ObservedMatrix::col_positions(Index j) const {
  const auto b = col_offsets_[static_cast<std::size_t>(j)];
  const auto e = col_offsets_[static_cast<std::size_t>(j) + 1];
  return std::span<const std::size_t>(col_order_).subspan(b, e - b);
}

ObservedMatrix ObservedMatrix::with_values(
    std::span<const double> values) const {
  if (values.size() != entries_.size()) {
    throw std::invalid_argument("with_values: size mismatch");
  }
  ObservedMatrix out = *this;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("with_values: non-finite value");
    }
    out.entries_[k].value = values[k];
  }
  return out;
}

double ObservedMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.value * e.value;
  return std::sqrt(s);
}

double ObservedMatrix::min_value() const {
  if (entries_.empty()) throw std::invalid_argument("min_value: no entries");
  double v = entries_.front().value;
  for (const Entry& e : entries_) v = std::min(v, e.value);
  return v;
}

double ObservedMatrix::max_value() const {
  if (entries_.empty()) throw std::invalid_argument("max_value: no entries");
  double v = entries_.front().value;
  for (const Entry& e : entries_) v = std::max(v, e.value);
  return v;
}

namespace {

void require_shape(const ObservedMatrix& y, const Factors& f,
                   const char* what) {
  if (f.rows() != y.rows() || f.cols() != y.cols()) {
    throw std::invalid_argument(
        std::string(what) + ": factors describe a " + std::to_string(f.rows()) +
        "x" + std::to_string(f.cols()) + " matrix, observations are " +
        std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
}

}  // namespace

std::vector<double> predict(const ObservedMatrix& y, const Factors& f) {
  require_shape(y, f, "predict");
  std::vector<double> out;
  out.reserve(y.size());
  for (const Entry& e : y.entries()) {
    out.push_back(f.u.row(e.row).dot(f.v.row(e.col)));
  }
  return out;
}

ObservedMatrix masked_residual(const ObservedMatrix& y, const Factors& f) {
  std::vector<double> r = predict(y, f);
  const auto entries = y.entries();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = entries[k].value - r[k];
  return y.with_values(r);
}

DenseMatrix adjoint_embed(const ObservedMatrix& r) {
  DenseMatrix out = DenseMatrix::Zero(r.rows(), r.cols());
  for (const Entry& e : r.entries()) out(e.row, e.col) = e.value;
  return out;
}

ObservedMatrix mask(const ObservedMatrix& pattern, const DenseMatrix& x) {
  if (x.rows() != pattern.rows() || x.cols() != pattern.cols()) {
    throw std::invalid_argument("mask: shape mismatch");
  }
  std::vector<double> values;
  values.reserve(pattern.size());
  for (const Entry& e : pattern.entries()) values.push_back(x(e.row, e.col));
  return pattern.with_values(values);
}

double loss_value(const ObservedMatrix& y, const Factors& f) {
  require_shape(y, f, "loss_value");
  double s = 0.0;
  for (const Entry& e : y.entries()) {
    const double r = e.value - f.u.row(e.row).dot(f.v.row(e.col));
    s += r * r;
  }
  return 0.5 * s;
}

double inner(const ObservedMatrix& a, const ObservedMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() != b.size()) {
    throw std::invalid_argument("inner: shape or index set mismatch");
  }
  const auto ea = a.entries();
  const auto eb = b.entries();
  double s = 0.0;
  for (std::size_t k = 0; k < ea.size(); ++k) {
    if (ea[k].row != eb[k].row || ea[k].col != eb[k].col) {
      throw std::invalid_argument("inner: index sets differ");
    }
    s += ea[k].value * eb[k].value;
  }
  return s;
}

}  // namespace varsp
