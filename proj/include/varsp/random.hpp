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

#ifndef VARSP_RANDOM_HPP_
#define VARSP_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace varsp {

// Seedable generator with named sub-streams. Uniform and Gaussian draws are
// computed here from raw 64-bit output instead of through <random>
// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from this generator's seed and a purpose tag,
  // e.g. rng.split("noise").
  Rng split(std::string_view purpose) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // standard Gaussian
  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace varsp

#endif  // VARSP_RANDOM_HPP_
