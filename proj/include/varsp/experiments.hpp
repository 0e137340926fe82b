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

#ifndef VARSP_EXPERIMENTS_HPP_
#define VARSP_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "varsp/factors.hpp"
#include "varsp/observed.hpp"

namespace varsp {

struct SynthSpec {
  Index m = 100;
  Index n = 100;
  Index rank = 5;
  // +infinity disables the noise.
  double snr_db = std::numeric_limits<double>::infinity();
  double missing_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  SynthSpec spec;
  DenseMatrix x_true;
  ObservedMatrix observed;  // noisy values on Z
  // Z-bar: the held-out positions, carrying X_true values.
  ObservedMatrix held_out;
  double noise_sigma = 0.0;
};

// X_true = A B^T with Gaussian A (m x r), B (n x r); Gaussian noise with
// variance |X_true|_F^2 / (m n 10^(snr/10)); Z uniform without replacement,
// |Z| = round((1 - missing) m n). Factors, noise and mask use separate
// sub-streams of the seed.
GroundTruth gen_synthetic(const SynthSpec& spec);

// Reads `user<TAB>item<TAB>rating<TAB>timestamp` lines with 1-based ids.
// Throws std::runtime_error with the line number on malformed input, naming
// the pair on duplicates, and "no observations" for an empty file.
ObservedMatrix parse_movielens(std::istream& in);
ObservedMatrix parse_movielens(const std::filesystem::path& path);

// Writes entries back in the same format (timestamp column 0), 1-based.
void write_movielens(std::ostream& out, const ObservedMatrix& obs);

// Uniform random partition with round(train_frac * |obs|) training entries.
MaskSplit split(const ObservedMatrix& obs, double train_frac,
                std::uint64_t seed);

// |P_Zbar(U V^T - X_true)|_F / |P_Zbar(X_true)|_F where held_out carries
// X_true on Z-bar. Throws std::invalid_argument for an empty set or a zero
// denominator.
double relative_error(const Factors& f, const ObservedMatrix& held_out);
double relative_error(const Factors& f, const DenseMatrix& x_true,
                      const ObservedMatrix& test_mask);

// Mean |Y_ij - u^i.v^j| over the test entries divided by (r_max - r_min).
// Predictions are not clipped to the rating range.
double nmae(const Factors& f, const ObservedMatrix& test, double r_min,
            double r_max);

// Lambda whose escape threshold sits kappa times above the expected spectral
// norm of the observed noise, noise_sigma sqrt(|Z| / mn) (sqrt m + sqrt n).
// Requires noise_sigma > 0 and kappa > 0.
double noise_calibrated_lambda(const ObservedMatrix& obs, double noise_sigma,
                               double kappa, double p);

// Fixture text format: a header line `m n r snr missing seed` followed by one
// `row col value` line per observation (0-based). snr is written as `inf`
// when noise is disabled.
void write_fixture(std::ostream& out, const GroundTruth& truth);
struct Fixture {
  SynthSpec spec;
  ObservedMatrix observed;
};
Fixture read_fixture(std::istream& in);
Fixture read_fixture(const std::filesystem::path& path);

}  // namespace varsp

#endif  // VARSP_EXPERIMENTS_HPP_
