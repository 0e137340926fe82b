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

#include "runs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace varsp::cli {
namespace {

ObservedMatrix reshape(const ObservedMatrix& obs, Index rows, Index cols) {
  const auto e = obs.entries();
  return ObservedMatrix(rows, cols, std::vector<Entry>(e.begin(), e.end()));
}

double rating_std(const ObservedMatrix& obs) {
  double mean = 0.0;
  for (const Entry& e : obs.entries()) mean += e.value;
  mean /= static_cast<double>(obs.size());
  double var = 0.0;
  for (const Entry& e : obs.entries()) var += (e.value - mean) * (e.value - mean);
  return std::sqrt(var / static_cast<double>(obs.size()));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

Problem synthetic_problem(const GroundTruth& gt) {
  Problem pr;
  pr.train = gt.observed;
  if (!gt.held_out.empty()) pr.held_out = gt.held_out;
  pr.spec = gt.spec;
  pr.noise_scale = gt.noise_sigma;
  return pr;
}

Problem fixture_problem(const std::filesystem::path& path, std::string* note) {
  const Fixture fx = read_fixture(path);
  Problem pr;
  pr.train = fx.observed;
  pr.spec = fx.spec;
  const GroundTruth gt = gen_synthetic(fx.spec);
  const auto a = gt.observed.entries();
  const auto b = fx.observed.entries();
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    if (!gt.held_out.empty()) pr.held_out = gt.held_out;
    pr.noise_scale = gt.noise_sigma;
  } else if (note != nullptr) {
    *note = "fixture observations do not match its header's generator; RE not scored";
  }
  return pr;
}

Problem ratings_problem(const std::filesystem::path& path,
                        const std::optional<std::filesystem::path>& test_path,
                        double train_frac, std::uint64_t split_seed) {
  const ObservedMatrix all = parse_movielens(path);
  Problem pr;
  if (test_path) {
    const ObservedMatrix test = parse_movielens(*test_path);
    const Index rows = std::max(all.rows(), test.rows());
    const Index cols = std::max(all.cols(), test.cols());
    pr.train = reshape(all, rows, cols);
    pr.test = reshape(test, rows, cols);
  } else {
    MaskSplit s = split(all, train_frac, split_seed);
    pr.train = std::move(s.train);
    pr.test = std::move(s.test);
  }
  if (pr.train.empty()) throw std::runtime_error("training set is empty");
  pr.r_min = std::min(pr.train.min_value(), pr.test->empty() ? pr.train.min_value()
                                                             : pr.test->min_value());
  pr.r_max = std::max(pr.train.max_value(), pr.test->empty() ? pr.train.max_value()
                                                             : pr.test->max_value());
  pr.noise_scale = rating_std(pr.train);
  return pr;
}

void set_rating_range(Problem& problem, std::optional<double> r_min,
                      std::optional<double> r_max) {
  if (r_min) problem.r_min = *r_min;
  if (r_max) problem.r_max = *r_max;
}

double lambda_from_kappa(const Problem& problem, double kappa, double p) {
  if (!(problem.noise_scale > 0.0)) {
    throw std::invalid_argument(
        "--kappa needs a noise scale: use a noisy fixture or ratings, or give --lambda");
  }
  return noise_calibrated_lambda(problem.train, problem.noise_scale, kappa, p);
}

RunRecord execute(const Problem& problem, const RunSpec& run, bool stable_timing) {
  RunRecord r;
  r.suite = run.suite;
  r.m = problem.train.rows();
  r.n = problem.train.cols();
  if (problem.spec) {
    r.true_rank = problem.spec->rank;
    r.snr_db = problem.spec->snr_db;
  }
  r.missing = 1.0 - static_cast<double>(problem.train.size()) /
                        (static_cast<double>(r.m) * static_cast<double>(r.n));
  r.p = run.p;
  r.lambda = run.lambda;
  r.init_rank = run.init_rank;
  r.escape = run.escape;
  r.seed = run.seed;

  SolverConfig cfg;
  cfg.p = run.p;
  cfg.lambda = run.lambda;
  cfg.init_width = run.init_rank;
  cfg.escape_enabled = run.escape;
  cfg.seed = run.seed;
  cfg.max_iter = run.limits.max_iter;
  cfg.conv_tol = run.limits.conv_tol;
  cfg.prune_thres = run.limits.prune_thres;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SolveResult res = solve(problem.train, cfg);
    r.iters = res.report.iters;
    r.escapes = res.report.escapes;
    r.final_rank = res.report.final_width;
    r.objective = res.report.objective_trace.empty()
                      ? objective(problem.train, res.factors, cfg)
                      : res.report.objective_trace.back();
    if (problem.held_out) r.re = relative_error(res.factors, *problem.held_out);
    if (problem.test && !problem.test->empty()) {
      r.nmae = nmae(res.factors, *problem.test, problem.r_min, problem.r_max);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  r.wall_ms = stable_timing
                  ? 0.0
                  : std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

const std::vector<std::string> kCsvColumns = {
    "suite",  "m",        "n",       "true_rank",  "missing",   "snr_db",
    "p",      "lambda",   "init_rank", "escape",   "seed",      "iters",
    "escapes", "final_rank", "objective", "re",    "nmae",      "wall_ms",
    "error"};

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_csv_header(std::ostream& out) {
  for (std::size_t k = 0; k < kCsvColumns.size(); ++k) {
    out << (k ? "," : "") << kCsvColumns[k];
  }
  out << '\n';
}

void write_csv_row(std::ostream& out, const RunRecord& r) {
  out << r.suite << ',' << r.m << ',' << r.n << ','
      << (r.true_rank ? std::to_string(*r.true_rank) : "nan") << ','
      << format_number(r.missing) << ',' << format_number(r.snr_db) << ','
      << format_number(r.p) << ',' << format_number(r.lambda) << ','
      << r.init_rank << ',' << (r.escape ? "on" : "off") << ',' << r.seed << ','
      << r.iters << ',' << r.escapes << ',' << r.final_rank << ','
      << format_number(r.objective) << ',' << format_number(r.re) << ','
      << format_number(r.nmae) << ',' << format_number(std::round(r.wall_ms * 1000) / 1000)
      << ',' << csv_escape(r.error) << '\n';
}

void write_json(std::ostream& out, const std::vector<RunRecord>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunRecord& r : rows) {
    nlohmann::json o;
    o["suite"] = r.suite;
    o["m"] = r.m;
    o["n"] = r.n;
    o["true_rank"] = r.true_rank ? nlohmann::json(*r.true_rank) : nlohmann::json(nullptr);
    o["missing"] = json_number(r.missing);
    o["snr_db"] = json_number(r.snr_db);
    o["p"] = r.p;
    o["lambda"] = json_number(r.lambda);
    o["init_rank"] = r.init_rank;
    o["escape"] = r.escape;
    o["seed"] = r.seed;
    o["iters"] = r.iters;
    o["escapes"] = r.escapes;
    o["final_rank"] = r.final_rank;
    o["objective"] = json_number(r.objective);
    o["re"] = json_number(r.re);
    o["nmae"] = json_number(r.nmae);
    o["wall_ms"] = r.wall_ms;
    o["error"] = r.error;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

void emit(const std::vector<RunRecord>& rows, const std::string& csv_path,
          const std::optional<std::string>& json_path) {
  auto write = [&](std::ostream& out) {
    write_csv_header(out);
    for (const RunRecord& r : rows) write_csv_row(out, r);
  };
  if (csv_path == "-") {
    write(std::cout);
  } else {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    write(out);
  }
  if (json_path) {
    std::ofstream out(*json_path);
    if (!out) throw std::runtime_error("cannot write " + *json_path);
    write_json(out, rows);
  }
}

}  // namespace varsp::cli
