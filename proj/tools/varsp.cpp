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

// varsp: synthetic instances, completion runs and benchmark grids for
// Schatten-p regularized matrix completion.
//
// Exit codes: 0 success, 1 runtime failure (including any failed run in a
// sweep), 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bench.hpp"
#include "runs.hpp"
#include "varsp/experiments.hpp"

namespace fs = std::filesystem;
using namespace varsp;
using namespace varsp::cli;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config files hold bare `key = value` lines; the keys belong to whichever
// subcommand was selected.
class SubcommandConfig : public CLI::ConfigBase {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}
  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigBase::from_config(in);
    const auto subs = app_->get_subcommands();
    if (!subs.empty()) {
      for (CLI::ConfigItem& it : items) {
        if (it.parents.empty()) it.parents = {subs.front()->get_name()};
      }
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("VARSP_OUT_DIR"); env && *env) {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

fs::path place(const fs::path& p, const fs::path& dir) {
  return p.is_absolute() ? p : dir / p;
}

std::vector<bool> escape_modes(const std::string& mode) {
  if (mode == "on") return {true};
  if (mode == "off") return {false};
  return {true, false};
}

const auto kUnitInterval = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "not a number: " + s;
      }
      return (v >= 0.0 && v < 1.0) ? "" : "must lie in [0, 1), got " + s;
    },
    "in [0, 1)");

const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v < 1.0) ? "" : "must lie in (0, 1), got " + s;
    },
    "in (0, 1)");

const auto kExponent = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v <= 1.0) ? "" : "p must lie in (0, 1], got " + s;
    },
    "in (0, 1]");

void add_limits(CLI::App* sub, SolverLimits& lim) {
  sub->add_option("--max-iter", lim.max_iter, "iteration cap per solve")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--conv-tol", lim.conv_tol, "relative change of UV^T that stops a solve")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--prune-thres", lim.prune_thres, "column norm below which columns are dropped")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
}

// synth ----------------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  std::string out;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& a) {
  try {
    a.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const GroundTruth gt = gen_synthetic(a.spec);
  const fs::path dir = output_dir(a.out_dir);
  const std::string name =
      a.out.empty() ? "synth_m" + std::to_string(a.spec.m) + "_n" + std::to_string(a.spec.n) +
                          "_r" + std::to_string(a.spec.rank) + "_seed" +
                          std::to_string(a.spec.seed) + ".txt"
                    : a.out;
  const fs::path path = place(name, dir);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_fixture(out, gt);
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
  std::cout << path.string() << '\n'
            << a.spec.m << "x" << a.spec.n << " rank " << a.spec.rank << ", observed "
            << gt.observed.size() << " (missing " << format_number(a.spec.missing_rate)
            << "), snr_db " << format_number(a.spec.snr_db) << ", noise sigma "
            << format_number(gt.noise_sigma) << ", seed " << a.spec.seed << '\n';
  return 0;
}

// complete ---------------------------------------------------------------------

struct CompleteArgs {
  std::string fixture;
  std::string ratings;
  std::string test;
  double train_frac = 0.5;
  std::uint64_t split_seed = 1;
  std::optional<double> rating_min;
  std::optional<double> rating_max;
  std::vector<double> ps{0.5};
  std::vector<double> lambdas;
  std::vector<double> kappas;
  std::vector<std::string> init_ranks{"10"};
  std::string escape = "off";
  std::vector<std::uint64_t> seeds{0};
  SolverLimits limits;
  std::string out = "-";
  std::string json;
  std::string out_dir;
  bool stable = false;
};

Index resolve_init_rank(const std::string& s, const Problem& pr) {
  std::size_t used = 0;
  const bool mult = !s.empty() && (s.back() == 'x' || s.back() == 'r');
  const std::string num = mult ? s.substr(0, s.size() - 1) : s;
  double v = 0;
  try {
    v = std::stod(num, &used);
  } catch (...) {
    used = 0;
  }
  if (used != num.size() || !(v > 0)) throw UsageError("bad --init-rank value: " + s);
  if (mult) {
    if (!pr.spec) throw UsageError("--init-rank " + s + " needs a fixture with a true rank");
    return std::max<Index>(1, static_cast<Index>(std::lround(v * static_cast<double>(pr.spec->rank))));
  }
  if (v != std::floor(v)) throw UsageError("--init-rank must be an integer or a multiple like 0.5x");
  return static_cast<Index>(v);
}

int cmd_complete(const CompleteArgs& a) {
  if (a.lambdas.empty() == a.kappas.empty()) {
    throw UsageError("give exactly one of --lambda or --kappa (lambda has no default)");
  }
  Problem pr;
  std::string note;
  if (!a.fixture.empty()) {
    pr = fixture_problem(a.fixture, &note);
  } else {
    pr = ratings_problem(a.ratings,
                         a.test.empty() ? std::nullopt : std::optional<fs::path>(a.test),
                         a.train_frac, a.split_seed);
    set_rating_range(pr, a.rating_min, a.rating_max);
    if (!(pr.r_max > pr.r_min)) throw UsageError("rating range must satisfy max > min");
  }
  if (!note.empty()) std::cerr << "note: " << note << '\n';

  std::vector<Index> d0s;
  for (const std::string& s : a.init_ranks) d0s.push_back(resolve_init_rank(s, pr));
  const bool by_kappa = !a.kappas.empty();
  if (by_kappa && !(pr.noise_scale > 0.0)) {
    throw UsageError("--kappa needs a noise scale (noisy fixture or ratings); give --lambda");
  }

  std::vector<RunRecord> rows;
  for (double p : a.ps) {
    for (double reg : by_kappa ? a.kappas : a.lambdas) {
      const double lambda = by_kappa ? lambda_from_kappa(pr, reg, p) : reg;
      for (Index d0 : d0s) {
        for (bool esc : escape_modes(a.escape)) {
          for (std::uint64_t seed : a.seeds) {
            RunSpec run;
            run.suite = "complete";
            run.p = p;
            run.lambda = lambda;
            run.init_rank = d0;
            run.escape = esc;
            run.seed = seed;
            run.limits = a.limits;
            rows.push_back(execute(pr, run, a.stable));
          }
        }
      }
    }
  }
  const fs::path dir = output_dir(a.out_dir);
  const std::string csv = a.out == "-" ? "-" : place(a.out, dir).string();
  const std::optional<std::string> json =
      a.json.empty() ? std::nullopt : std::optional<std::string>(place(a.json, dir).string());
  emit(rows, csv, json);
  int failed = 0;
  for (const RunRecord& r : rows) {
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "run failed (p=" << r.p << ", lambda=" << r.lambda
                << ", init_rank=" << r.init_rank << ", seed=" << r.seed << "): " << r.error
                << '\n';
    }
  }
  return failed ? 1 : 0;
}

// bench ---------------------------------------------------------------------------

struct BenchArgs {
  std::string suite;
  CLI::App* sub = nullptr;
  Index m = 200, n = 200, rank = 10;
  double missing = 0.4, snr = 10.0;
  int seeds = 5;
  std::vector<double> ps, kappas, init_mults;
  std::string escape = "both";
  std::string data;
  double train_frac = 0.5;
  std::uint64_t split_seed = 1;
  std::vector<Index> init_ranks;
  std::optional<double> lambda;
  SolverLimits limits;
  std::string out_dir;
  bool json = false;
  bool stable = false;
};

bool given(const BenchArgs& a, const std::string& flag) { return a.sub->count(flag) > 0; }

int cmd_bench(const BenchArgs& a) {
  BenchResult res;
  if (a.suite == "movielens") {
    if (a.data.empty()) {
      throw UsageError(
          "bench movielens needs --data PATH: a MovieLens-100K u.data file "
          "(tab-separated user, item, rating, timestamp). Prepare splits with "
          "`varsp movielens-prep` or pass the raw file here.");
    }
    MovielensBench b;
    b.data = a.data;
    b.train_frac = a.train_frac;
    b.split_seed = a.split_seed;
    if (given(a, "--init-ranks")) b.init_ranks = a.init_ranks;
    if (given(a, "--p")) b.ps = a.ps;
    if (given(a, "--kappa")) {
      if (a.kappas.size() != 1) throw UsageError("bench movielens takes a single --kappa");
      b.kappa = a.kappas.front();
    }
    b.lambda = a.lambda;
    if (given(a, "--escape")) b.escapes = escape_modes(a.escape);
    b.seeds = given(a, "--seeds") ? a.seeds : 1;
    b.limits = a.limits;
    res = run_movielens(b, a.stable);
  } else {
    if (given(a, "--lambda") || given(a, "--data")) {
      throw UsageError("--lambda and --data apply to the movielens suite only");
    }
    SyntheticBench b = a.suite == "table1" ? table1_defaults() : ptrend_defaults();
    if (given(a, "--m")) b.m = a.m;
    if (given(a, "--n")) b.n = a.n;
    if (given(a, "--rank")) b.rank = a.rank;
    if (given(a, "--missing")) b.missing = a.missing;
    if (given(a, "--snr")) b.snr_db = a.snr;
    if (given(a, "--seeds")) b.seeds = a.seeds;
    if (given(a, "--p")) b.ps = a.ps;
    if (given(a, "--kappa")) b.kappas = a.kappas;
    if (given(a, "--init-mult")) b.init_mults = a.init_mults;
    if (given(a, "--escape")) b.escapes = escape_modes(a.escape);
    b.limits = a.limits;
    if (!std::isfinite(b.snr_db)) throw UsageError("synthetic suites need a finite --snr");
    SynthSpec check;
    check.m = b.m;
    check.n = b.n;
    check.rank = b.rank;
    check.missing_rate = b.missing;
    check.snr_db = b.snr_db;
    try {
      check.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    res = a.suite == "table1" ? run_table1(b, a.stable) : run_ptrend(b, a.stable);
  }

  const fs::path dir = output_dir(a.out_dir);
  const fs::path runs = dir / (a.suite + "_runs.csv");
  const fs::path summary = dir / (a.suite + "_summary.csv");
  emit(res.runs, runs.string(),
       a.json ? std::optional<std::string>((dir / (a.suite + "_runs.json")).string())
              : std::nullopt);
  std::ofstream s(summary);
  if (!s) throw std::runtime_error("cannot write " + summary.string());
  write_summary_csv(s, res.summary);
  print_summary(std::cout, res.summary);
  std::cout << "runs: " << runs.string() << " (" << res.runs.size() << " rows)\n"
            << "summary: " << summary.string() << '\n';
  int failed = 0;
  for (const RunRecord& r : res.runs) failed += r.error.empty() ? 0 : 1;
  if (failed) std::cerr << failed << " run(s) failed; see the error column\n";
  return failed ? 1 : 0;
}

// movielens-prep ----------------------------------------------------------------

struct PrepArgs {
  std::string in;
  double train_frac = 0.5;
  std::uint64_t seed = 1;
  std::string prefix = "ml";
  std::string out_dir;
};

int cmd_prep(const PrepArgs& a) {
  const ObservedMatrix all = parse_movielens(a.in);
  const MaskSplit s = split(all, a.train_frac, a.seed);
  const fs::path dir = output_dir(a.out_dir);
  const fs::path train = dir / (a.prefix + "_train.data");
  const fs::path test = dir / (a.prefix + "_test.data");
  for (const auto& [path, obs] : {std::pair{train, &s.train}, std::pair{test, &s.test}}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_movielens(out, *obs);
  }
  std::cout << train.string() << '\n'
            << test.string() << '\n'
            << all.rows() << " users, " << all.cols() << " items, " << all.size()
            << " ratings in [" << format_number(all.min_value()) << ", "
            << format_number(all.max_value()) << "]; train " << s.train.size() << ", test "
            << s.test.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schatten-p matrix completion: instances, runs and benchmark grids"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "file of `key = value` lines for the subcommand's flags; flags win");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "write a synthetic instance to a fixture file");
  synth->add_option("--m", sa.spec.m, "rows")->required()->check(CLI::PositiveNumber);
  synth->add_option("--n", sa.spec.n, "columns")->required()->check(CLI::PositiveNumber);
  synth->add_option("--rank", sa.spec.rank, "true rank")->required()->check(CLI::NonNegativeNumber);
  synth->add_option("--snr", sa.spec.snr_db, "SNR in dB; omit (or inf) for no noise");
  synth->add_option("--missing", sa.spec.missing_rate, "fraction of unobserved entries")
      ->capture_default_str()
      ->check(kUnitInterval);
  synth->add_option("--seed", sa.spec.seed)->capture_default_str();
  synth->add_option("--out", sa.out, "fixture path (relative paths go under the output dir)");
  synth->add_option("--out-dir", sa.out_dir, "output dir (default $VARSP_OUT_DIR or .)");

  CompleteArgs ca;
  auto* complete = app.add_subcommand("complete", "solve one instance over a sweep of settings");
  auto* in_fix = complete->add_option("--fixture", ca.fixture, "synthetic fixture file")
                     ->check(CLI::ExistingFile);
  auto* in_rat = complete->add_option("--ratings", ca.ratings, "MovieLens-format ratings file")
                     ->check(CLI::ExistingFile);
  in_fix->excludes(in_rat);
  auto* test_opt = complete->add_option("--test", ca.test, "held-out ratings file for NMAE")
                       ->check(CLI::ExistingFile)
                       ->needs(in_rat);
  complete->add_option("--train-frac", ca.train_frac, "split used when --test is absent")
      ->capture_default_str()
      ->check(kOpenUnit)
      ->needs(in_rat)
      ->excludes(test_opt);
  complete->add_option("--split-seed", ca.split_seed)->capture_default_str()->needs(in_rat);
  complete->add_option("--rating-min", ca.rating_min, "NMAE range (default: data min)")->needs(in_rat);
  complete->add_option("--rating-max", ca.rating_max, "NMAE range (default: data max)")->needs(in_rat);
  complete->add_option("--p", ca.ps, "exponent list, e.g. 0.3,0.5,1")
      ->delimiter(',')
      ->capture_default_str()
      ->check(kExponent);
  auto* lam = complete->add_option("--lambda", ca.lambdas, "regularization weights")
                  ->delimiter(',')
                  ->check(CLI::NonNegativeNumber);
  auto* kap = complete->add_option("--kappa", ca.kappas,
                                   "noise-calibrated lambda: escape threshold at kappa times "
                                   "the observed noise norm")
                  ->delimiter(',')
                  ->check(CLI::PositiveNumber);
  lam->excludes(kap);
  complete->add_option("--init-rank", ca.init_ranks, "initial widths: integers or multiples of the true rank like 0.5x")
      ->delimiter(',')
      ->capture_default_str();
  complete->add_option("--escape", ca.escape, "rank-one escapes")
      ->capture_default_str()
      ->check(CLI::IsMember({"on", "off", "both"}));
  complete->add_option("--seed", ca.seeds, "solver seeds")->delimiter(',')->capture_default_str();
  add_limits(complete, ca.limits);
  complete->add_option("--out", ca.out, "CSV path, - for stdout")->capture_default_str();
  complete->add_option("--json", ca.json, "also write the rows as JSON here");
  complete->add_option("--out-dir", ca.out_dir, "output dir (default $VARSP_OUT_DIR or .)");
  complete->add_flag("--stable", ca.stable, "write wall_ms as 0 for byte-identical output");
  complete->callback([&] {
    if (ca.fixture.empty() && ca.ratings.empty())
      throw CLI::RequiredError("--fixture or --ratings");
  });

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "run a predefined grid: table1, ptrend or movielens");
  ba.sub = bench;
  bench->add_option("suite", ba.suite, "table1 | ptrend | movielens")
      ->required()
      ->check(CLI::IsMember({"table1", "ptrend", "movielens"}));
  bench->add_option("--m", ba.m)->check(CLI::PositiveNumber);
  bench->add_option("--n", ba.n)->check(CLI::PositiveNumber);
  bench->add_option("--rank", ba.rank)->check(CLI::PositiveNumber);
  bench->add_option("--missing", ba.missing)->check(kUnitInterval);
  bench->add_option("--snr", ba.snr, "dB");
  bench->add_option("--seeds", ba.seeds, "number of seeds (1..N)")->check(CLI::PositiveNumber);
  bench->add_option("--p", ba.ps)->delimiter(',')->check(kExponent);
  bench->add_option("--kappa", ba.kappas, "noise-calibrated lambda multiples")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--init-mult", ba.init_mults, "initial width as multiples of the true rank")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--escape", ba.escape)->check(CLI::IsMember({"on", "off", "both"}));
  bench->add_option("--data", ba.data, "movielens: ratings file")->check(CLI::ExistingFile);
  bench->add_option("--train-frac", ba.train_frac, "movielens: training fraction")
      ->capture_default_str()
      ->check(kOpenUnit);
  bench->add_option("--split-seed", ba.split_seed)->capture_default_str();
  bench->add_option("--init-ranks", ba.init_ranks, "movielens: initial widths")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--lambda", ba.lambda, "movielens: fixed lambda instead of the kappa rule")
      ->check(CLI::NonNegativeNumber);
  add_limits(bench, ba.limits);
  bench->add_option("--out-dir", ba.out_dir, "output dir (default $VARSP_OUT_DIR or .)");
  bench->add_flag("--json", ba.json, "also write <suite>_runs.json");
  bench->add_flag("--stable", ba.stable, "write wall_ms as 0 for byte-identical output");

  PrepArgs pa;
  auto* prep = app.add_subcommand("movielens-prep", "validate a ratings file and split it into train/test files");
  prep->add_option("--in", pa.in, "MovieLens u.data file")->required()->check(CLI::ExistingFile);
  prep->add_option("--train-frac", pa.train_frac)->capture_default_str()->check(kOpenUnit);
  prep->add_option("--seed", pa.seed)->capture_default_str();
  prep->add_option("--prefix", pa.prefix, "output names <prefix>_train.data, <prefix>_test.data")
      ->capture_default_str();
  prep->add_option("--out-dir", pa.out_dir, "output dir (default $VARSP_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(sa);
    if (*complete) return cmd_complete(ca);
    if (*bench) return cmd_bench(ba);
    return cmd_prep(pa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
