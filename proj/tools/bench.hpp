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

// The predefined benchmark grids: table1 (rank initialization vs rank-one
// escapes), ptrend (RE against p with a per-p lambda sweep) and movielens
// (NMAE against initial rank on ratings data).

#ifndef VARSP_TOOLS_BENCH_HPP_
#define VARSP_TOOLS_BENCH_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "runs.hpp"

namespace varsp::cli {

struct SummaryRow {
  std::string suite;
  std::string row;  // table row label, e.g. "0.5r", "kappa=2", "best", "d0=20"
  double p = 0.0;
  bool escape = false;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  int runs = 0;
  int failures = 0;
  double median_re = std::numeric_limits<double>::quiet_NaN();
  double median_final_rank = std::numeric_limits<double>::quiet_NaN();
  double median_nmae = std::numeric_limits<double>::quiet_NaN();
};

struct BenchResult {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
};

struct SyntheticBench {
  Index m = 200;
  Index n = 200;
  Index rank = 10;
  double missing = 0.4;
  double snr_db = 10.0;
  int seeds = 5;  // instance and solver seeds 1..seeds
  std::vector<double> ps;
  std::vector<double> kappas;
  std::vector<double> init_mults;
  std::vector<bool> escapes;
  SolverLimits limits;
};

SyntheticBench table1_defaults();
SyntheticBench ptrend_defaults();

BenchResult run_table1(const SyntheticBench& b, bool stable_timing);
// Summary adds a "best" row per p at the kappa with the lowest median RE.
BenchResult run_ptrend(const SyntheticBench& b, bool stable_timing);

struct MovielensBench {
  std::filesystem::path data;
  double train_frac = 0.5;
  std::uint64_t split_seed = 1;
  std::vector<Index> init_ranks{10, 20, 30};
  std::vector<double> ps{0.5, 0.3};
  std::optional<double> lambda;
  // Applied to the rating std as the noise scale.
  double kappa = 2.0;
  std::vector<bool> escapes{true};
  int seeds = 1;
  SolverLimits limits;
};

BenchResult run_movielens(const MovielensBench& b, bool stable_timing);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
// Wide text table: one line per row label, one column group per (p, escape).
void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace varsp::cli

#endif  // VARSP_TOOLS_BENCH_HPP_
