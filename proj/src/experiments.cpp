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

#include "varsp/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "varsp/escape.hpp"
#include "varsp/random.hpp"

namespace varsp {

void SynthSpec::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("m and n must be >= 1");
  if (rank < 1 || rank > std::min(m, n)) {
    throw std::invalid_argument("rank must lie in [1, min(m, n)]");
  }
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw std::invalid_argument("missing rate must lie in [0, 1)");
  }
  if (std::isnan(snr_db)) throw std::invalid_argument("snr is NaN");
}

namespace {

// First k positions of a Fisher-Yates shuffle of 0..count-1.
std::vector<std::size_t> partial_shuffle(std::size_t count, std::size_t k,
                                         Rng& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k && i + 1 < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(count - i));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace

GroundTruth gen_synthetic(const SynthSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);
  Rng factor_rng = root.split("factors");
  Rng noise_rng = root.split("noise");
  Rng mask_rng = root.split("mask");

  DenseMatrix a(spec.m, spec.rank);
  DenseMatrix b(spec.n, spec.rank);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = factor_rng.normal();
  for (Index i = 0; i < b.size(); ++i) b.data()[i] = factor_rng.normal();

  GroundTruth out;
  out.spec = spec;
  out.x_true = a * b.transpose();

  DenseMatrix y = out.x_true;
  const double cells = static_cast<double>(spec.m * spec.n);
  if (std::isfinite(spec.snr_db)) {
    out.noise_sigma = std::sqrt(out.x_true.squaredNorm() /
                                (cells * std::pow(10.0, spec.snr_db / 10.0)));
    for (Index i = 0; i < y.size(); ++i) {
      y.data()[i] += out.noise_sigma * noise_rng.normal();
    }
  }

  const auto total = static_cast<std::size_t>(spec.m * spec.n);
  const auto observed =
      static_cast<std::size_t>(std::llround((1.0 - spec.missing_rate) * cells));
  const std::vector<std::size_t> order =
      partial_shuffle(total, observed, mask_rng);
  std::vector<Entry> seen;
  std::vector<Entry> unseen;
  seen.reserve(observed);
  unseen.reserve(total - observed);
  for (std::size_t k = 0; k < total; ++k) {
    const auto cell = static_cast<Index>(order[k]);
    const Index i = cell / spec.n;
    const Index j = cell % spec.n;
    if (k < observed) {
      seen.push_back({i, j, y(i, j)});
    } else {
      unseen.push_back({i, j, out.x_true(i, j)});
    }
  }
  out.observed = ObservedMatrix(spec.m, spec.n, std::move(seen));
  out.held_out = ObservedMatrix(spec.m, spec.n, std::move(unseen));
  return out;
}

ObservedMatrix parse_movielens(std::istream& in) {
  std::vector<Entry> entries;
  std::unordered_map<std::uint64_t, std::size_t> first_line;
  Index max_user = 0;
  Index max_item = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long user = 0;
    long long item = 0;
    double rating = 0.0;
    if (!(fields >> user >> item >> rating)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected user, item, rating, timestamp");
    }
    long long timestamp = 0;
    fields >> timestamp;  // optional, discarded
    std::string extra;
    if (fields >> extra) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": unexpected trailing field '" + extra + "'");
    }
    if (user < 1 || item < 1) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": ids are 1-based");
    }
    if (!std::isfinite(rating)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": rating is not finite");
    }
    const auto key = (static_cast<std::uint64_t>(user) << 32) |
                     static_cast<std::uint64_t>(item);
    const auto [it, fresh] = first_line.emplace(key, line_no);
    if (!fresh) {
      throw std::runtime_error(
          "line " + std::to_string(line_no) + ": duplicate rating for user " +
          std::to_string(user) + ", item " + std::to_string(item) +
          " (first seen on line " + std::to_string(it->second) + ")");
    }
    max_user = std::max<Index>(max_user, user);
    max_item = std::max<Index>(max_item, item);
    entries.push_back({user - 1, item - 1, rating});
  }
  if (entries.empty()) throw std::runtime_error("no observations");
  return ObservedMatrix(max_user, max_item, std::move(entries));
}

ObservedMatrix parse_movielens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_movielens(in);
}

void write_movielens(std::ostream& out, const ObservedMatrix& obs) {
  out << std::setprecision(17);
  for (const Entry& e : obs.entries()) {
    out << e.row + 1 << '\t' << e.col + 1 << '\t' << e.value << "\t0\n";
  }
}

MaskSplit split(const ObservedMatrix& obs, double train_frac,
                std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("train_frac must lie in (0, 1)");
  }
  Rng rng = Rng(seed).split("split");
  const std::size_t total = obs.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(total)));
  const std::vector<std::size_t> order = partial_shuffle(total, n_train, rng);
  const auto entries = obs.entries();
  std::vector<Entry> train;
  std::vector<Entry> test;
  for (std::size_t k = 0; k < total; ++k) {
    (k < n_train ? train : test).push_back(entries[order[k]]);
  }
  return {ObservedMatrix(obs.rows(), obs.cols(), std::move(train)),
          ObservedMatrix(obs.rows(), obs.cols(), std::move(test))};
}

double relative_error(const Factors& f, const ObservedMatrix& held_out) {
  if (held_out.empty()) {
    throw std::invalid_argument("relative_error: empty held-out set");
  }
  const std::vector<double> pred = predict(held_out, f);
  const auto entries = held_out.entries();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - entries[k].value;
    num += d * d;
    den += entries[k].value * entries[k].value;
  }
  if (!(den > 0.0)) {
    throw std::invalid_argument("relative_error: X_true is zero on Z-bar");
  }
  return std::sqrt(num / den);
}

double relative_error(const Factors& f, const DenseMatrix& x_true,
                      const ObservedMatrix& test_mask) {
  return relative_error(f, mask(test_mask, x_true));
}

double nmae(const Factors& f, const ObservedMatrix& test, double r_min,
            double r_max) {
  if (test.empty()) throw std::invalid_argument("nmae: empty test set");
  if (!(r_max > r_min)) throw std::invalid_argument("nmae: r_max <= r_min");
  const std::vector<double> pred = predict(test, f);
  const auto entries = test.entries();
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    total += std::abs(entries[k].value - pred[k]);
  }
  return total / static_cast<double>(pred.size()) / (r_max - r_min);
}

double noise_calibrated_lambda(const ObservedMatrix& obs, double noise_sigma,
                               double kappa, double p) {
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma))
    throw std::invalid_argument("noise_calibrated_lambda: noise_sigma must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("noise_calibrated_lambda: kappa must be positive");
  const double m = static_cast<double>(obs.rows());
  const double n = static_cast<double>(obs.cols());
  const double frac = static_cast<double>(obs.size()) / (m * n);
  const double noise_norm =
      noise_sigma * std::sqrt(frac) * (std::sqrt(m) + std::sqrt(n));
  return lambda_for_sigma_threshold(kappa * noise_norm, p);
}

void write_fixture(std::ostream& out, const GroundTruth& truth) {
  const SynthSpec& s = truth.spec;
  out << std::setprecision(17);
  out << s.m << ' ' << s.n << ' ' << s.rank << ' ';
  if (std::isfinite(s.snr_db)) {
    out << s.snr_db;
  } else {
    out << "inf";
  }
  out << ' ' << s.missing_rate << ' ' << s.seed << '\n';
  for (const Entry& e : truth.observed.entries()) {
    out << e.row << ' ' << e.col << ' ' << e.value << '\n';
  }
}

Fixture read_fixture(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("fixture: empty input");
  std::istringstream header(line);
  Fixture fx;
  std::string snr;
  if (!(header >> fx.spec.m >> fx.spec.n >> fx.spec.rank >> snr >>
        fx.spec.missing_rate >> fx.spec.seed)) {
    throw std::runtime_error("fixture line 1: expected `m n r snr missing seed`");
  }
  if (snr == "inf") {
    fx.spec.snr_db = std::numeric_limits<double>::infinity();
  } else {
    try {
      fx.spec.snr_db = std::stod(snr);
    } catch (const std::exception&) {
      throw std::runtime_error("fixture line 1: bad snr '" + snr + "'");
    }
  }
  std::vector<Entry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Entry e;
    if (!(fields >> e.row >> e.col >> e.value)) {
      throw std::runtime_error("fixture line " + std::to_string(line_no) +
                               ": expected `row col value`");
    }
    entries.push_back(e);
  }
  fx.observed = ObservedMatrix(fx.spec.m, fx.spec.n, std::move(entries));
  return fx;
}

Fixture read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_fixture(in);
}

}  // namespace varsp
