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

// Run records, CSV/JSON emission and the problem wrappers shared by the
// subcommands.

#ifndef VARSP_TOOLS_RUNS_HPP_
#define VARSP_TOOLS_RUNS_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "varsp/experiments.hpp"
#include "varsp/solver.hpp"

namespace varsp::cli {

// What a run is solved on and scored against.
struct Problem {
  ObservedMatrix train;
  // X_true on the unobserved positions; enables RE.
  std::optional<ObservedMatrix> held_out;
  // Held-out ratings; enables NMAE over [r_min, r_max].
  std::optional<ObservedMatrix> test;
  double r_min = 0.0;
  double r_max = 0.0;
  // Present for synthetic instances.
  std::optional<SynthSpec> spec;
  // Scale fed to the kappa rule: the noise std for synthetic data, the
  // rating std for ratings.
  double noise_scale = 0.0;
};

Problem synthetic_problem(const GroundTruth& gt);

// Reads a fixture. When the header regenerates the same observations the
// ground truth is attached so RE can be scored; otherwise RE stays nan and
// *note explains why.
Problem fixture_problem(const std::filesystem::path& path, std::string* note);

// Ratings in MovieLens format. With a test file, NMAE is scored on it;
// without one the ratings are split with train_frac and split_seed.
Problem ratings_problem(const std::filesystem::path& path,
                        const std::optional<std::filesystem::path>& test_path,
                        double train_frac, std::uint64_t split_seed);

// Overrides the NMAE range taken from the data.
void set_rating_range(Problem& problem, std::optional<double> r_min,
                      std::optional<double> r_max);

struct SolverLimits {
  int max_iter = 1000;
  double conv_tol = 1e-4;
  double prune_thres = 1e-5;
};

struct RunSpec {
  std::string suite;
  double p = 0.5;
  double lambda = 0.0;
  Index init_rank = 1;
  bool escape = false;
  std::uint64_t seed = 0;
  SolverLimits limits;
};

struct RunRecord {
  std::string suite;
  Index m = 0;
  Index n = 0;
  std::optional<Index> true_rank;
  double missing = 0.0;
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  double p = 0.0;
  double lambda = 0.0;
  Index init_rank = 0;
  bool escape = false;
  std::uint64_t seed = 0;
  int iters = 0;
  int escapes = 0;
  Index final_rank = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double re = std::numeric_limits<double>::quiet_NaN();
  double nmae = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
  // Empty on success.
  std::string error;
};

// Solves one configuration. Solver exceptions are caught and reported in
// the record's error field. With stable_timing the wall time is written as 0
// so repeated runs produce identical bytes.
RunRecord execute(const Problem& problem, const RunSpec& run, bool stable_timing);

// Lambda from a kappa multiple of the problem's noise scale.
double lambda_from_kappa(const Problem& problem, double kappa, double p);

extern const std::vector<std::string> kCsvColumns;

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRecord& r);
void write_json(std::ostream& out, const std::vector<RunRecord>& rows);

// Number formatting used in every CSV cell: nan and inf spelled out,
// otherwise 10 significant digits.
std::string format_number(double x);

// Median of the non-nan values; nan when there are none.
double median(std::vector<double> values);

// Writes rows to path ("-" is stdout) and an optional JSON mirror.
void emit(const std::vector<RunRecord>& rows, const std::string& csv_path,
          const std::optional<std::string>& json_path);

}  // namespace varsp::cli

#endif  // VARSP_TOOLS_RUNS_HPP_
