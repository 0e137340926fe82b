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

// End-to-end checks of the varsp binary: exit codes, CSV contract, sweeps,
// config files, output locations and byte stability.

#include <doctest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "standin.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" VARSP_CLI "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path work(const std::string& name) {
  const fs::path dir = fs::path(VARSP_CLI_WORK) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// CSV rows (header dropped) from stdout that may carry stderr notes.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  for (const std::string& l : lines(text)) {
    if (l.rfind("suite,", 0) == 0) {
      seen_header = true;
      continue;
    }
    if (seen_header && l.find(',') != std::string::npos) rows.push_back(cells(l));
  }
  return rows;
}

const char* kHeader =
    "suite,m,n,true_rank,missing,snr_db,p,lambda,init_rank,escape,seed,iters,escapes,"
    "final_rank,objective,re,nmae,wall_ms,error";

enum Col { kSuite, kM, kN, kTrueRank, kMissing, kSnr, kP, kLambda, kInit, kEscape, kSeed,
           kIters, kEscapes, kFinal, kObjective, kRe, kNmae, kWall, kError };

fs::path make_fixture(const fs::path& dir, const std::string& args) {
  const Result r = run("synth " + args + " --out-dir \"" + dir.string() + "\"");
  REQUIRE(r.code == 0);
  return lines(r.out).front();
}

TEST_CASE("synth: fixture, summary line and usage errors") {
  const fs::path dir = work("synth");
  const Result ok = run("synth --m 200 --n 200 --rank 10 --snr 10 --missing 0.4 --seed 7 --out-dir \"" +
                        dir.string() + "\"");
  CHECK(ok.code == 0);
  const auto out = lines(ok.out);
  REQUIRE(out.size() == 2);
  CHECK(fs::exists(out[0]));
  CHECK(out[1].find("200x200 rank 10, observed 24000") != std::string::npos);
  CHECK(lines(slurp(out[0])).front() == "200 200 10 10 0.40000000000000002 7");

  CHECK(run("synth --m 20 --n 20 --snr 10").code == 2);
  CHECK(run("synth --m 20 --n 20 --rank 2 --missing 1.0").code == 2);
  CHECK(run("synth --m 20 --n 20 --rank 30").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("synth honours VARSP_OUT_DIR") {
  const fs::path dir = work("env");
  const Result r = run("synth --m 10 --n 8 --rank 2 --seed 3", "VARSP_OUT_DIR=\"" + dir.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "synth_m10_n8_r2_seed3.txt"));
}

TEST_CASE("complete: one row per configuration in the documented column order") {
  const fs::path dir = work("complete");
  const fs::path fx = make_fixture(dir, "--m 60 --n 50 --rank 3 --snr 10 --missing 0.4 --seed 7");
  const Result one = run("complete --fixture \"" + fx.string() +
                         "\" --kappa 1.5 --init-rank 3 --escape on --seed 1");
  REQUIRE(one.code == 0);
  CHECK(lines(one.out).front() == kHeader);
  const auto rows = csv_rows(one.out);
  REQUIRE(rows.size() == 1);
  const auto& r = rows[0];
  CHECK(r.size() == 19);
  CHECK(r[kSuite] == "complete");
  CHECK(r[kM] == "60");
  CHECK(r[kTrueRank] == "3");
  CHECK(r[kEscape] == "on");
  CHECK(std::stol(r[kFinal]) <= std::stol(r[kInit]) + std::stol(r[kEscapes]));
  CHECK(std::isfinite(std::stod(r[kRe])));
  CHECK(r[kNmae] == "nan");
  CHECK(r[kError].empty());

  const Result sweep = run("complete --fixture \"" + fx.string() +
                           "\" --lambda 5 --p 0.3,0.5,1.0 --init-rank 4");
  REQUIRE(sweep.code == 0);
  const auto srows = csv_rows(sweep.out);
  REQUIRE(srows.size() == 3);
  CHECK(srows[0][kP] == "0.3");
  CHECK(srows[1][kP] == "0.5");
  CHECK(srows[2][kP] == "1");
  for (const auto& s : srows) CHECK(s[kLambda] == "5");

  const Result grid = run("complete --fixture \"" + fx.string() +
                          "\" --lambda 5,10 --init-rank 2,6 --escape both --seed 1,2");
  REQUIRE(grid.code == 0);
  CHECK(csv_rows(grid.out).size() == 16);
}

TEST_CASE("complete: escapes beat no escapes from an under-parameterized start") {
  const fs::path dir = work("table1");
  const fs::path fx =
      make_fixture(dir, "--m 200 --n 200 --rank 10 --snr 10 --missing 0.4 --seed 2");
  const Result r = run("complete --fixture \"" + fx.string() +
                       "\" --kappa 1.5 --init-rank 0.5x --escape both --seed 2");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][kEscape] == "on");
  CHECK(rows[1][kEscape] == "off");
  CHECK(rows[0][kInit] == "5");
  CHECK(std::stod(rows[0][kRe]) < std::stod(rows[1][kRe]));
}

TEST_CASE("complete: usage errors") {
  const fs::path dir = work("complete_usage");
  const fs::path fx = make_fixture(dir, "--m 12 --n 10 --rank 2 --seed 1");
  const std::string f = "--fixture \"" + fx.string() + "\"";
  CHECK(run("complete " + f).code == 2);                          // no lambda
  CHECK(run("complete " + f + " --lambda 1 --kappa 1").code == 2);  // both
  CHECK(run("complete " + f + " --kappa 1").code == 2);           // noiseless: no scale
  CHECK(run("complete " + f + " --lambda 1 --p 1.5").code == 2);
  CHECK(run("complete " + f + " --lambda 1 --init-rank abc").code == 2);
  CHECK(run("complete --lambda 1").code == 2);                    // no input
  CHECK(run("complete --fixture /nonexistent --lambda 1").code == 2);
}

TEST_CASE("complete: a failing run is recorded and the sweep finishes with exit 1") {
  const fs::path dir = work("failure");
  const fs::path fx = make_fixture(dir, "--m 6 --n 5 --rank 2 --snr 20 --seed 2");
  // lambda = 0 with more columns than rows of V leaves V^T V singular.
  const Result r = run("complete --fixture \"" + fx.string() +
                       "\" --lambda 0,1 --init-rank 8 --out \"" + (dir / "runs.csv").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("run failed") != std::string::npos);
  const auto rows = csv_rows(slurp(dir / "runs.csv"));
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0][kError].empty());
  CHECK(rows[1][kError].empty());
  CHECK(std::isfinite(std::stod(rows[1][kObjective])));
}

TEST_CASE("complete: --stable output is byte-identical and the JSON mirror matches") {
  const fs::path dir = work("stable");
  const fs::path fx = make_fixture(dir, "--m 40 --n 30 --rank 3 --snr 12 --missing 0.3 --seed 5");
  const std::string args = "complete --fixture \"" + fx.string() +
                           "\" --kappa 1,2 --p 0.5,0.8 --init-rank 5 --escape both --stable "
                           "--out-dir \"" + dir.string() + "\" --json runs.json --out ";
  REQUIRE(run(args + "a.csv").code == 0);
  REQUIRE(run(args + "b.csv").code == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(lines(a).size() == 9);
  const auto j = nlohmann::json::parse(slurp(dir / "runs.json"));
  REQUIRE(j.size() == 8);
  CHECK(j[0]["suite"] == "complete");
  CHECK(j[0]["wall_ms"] == 0.0);
  CHECK(j[0]["nmae"].is_null());
}

TEST_CASE("config file supplies flags; command-line flags win") {
  const fs::path dir = work("config");
  const fs::path fx = make_fixture(dir, "--m 30 --n 20 --rank 2 --snr 15 --seed 4");
  {
    std::ofstream c(dir / "run.conf");
    c << "# sweep settings\nlambda = 3\np = 0.5\ninit-rank = 4\nescape = on\nstable = true\n";
  }
  const std::string base =
      "complete --fixture \"" + fx.string() + "\" --config \"" + (dir / "run.conf").string() + "\"";
  const Result r = run(base);
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][kLambda] == "3");
  CHECK(rows[0][kInit] == "4");
  CHECK(rows[0][kEscape] == "on");
  CHECK(rows[0][kWall] == "0");
  const Result over = run(base + " --init-rank 2");
  REQUIRE(over.code == 0);
  rows = csv_rows(over.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][kInit] == "2");
  {
    std::ofstream c(dir / "bad.conf");
    c << "lamda = 3\n";
  }
  CHECK(run("complete --fixture \"" + fx.string() + "\" --lambda 1 --config \"" +
            (dir / "bad.conf").string() + "\"")
            .code == 2);
}

TEST_CASE("ratings: movielens-prep split and complete scores NMAE") {
  const fs::path dir = work("ratings");
  const std::size_t n = varsp::standin::write_ratings(dir / "u.data", 60, 80, 0.2, 3);
  const Result prep = run("movielens-prep --in \"" + (dir / "u.data").string() +
                          "\" --train-frac 0.5 --seed 2 --out-dir \"" + dir.string() + "\"");
  REQUIRE(prep.code == 0);
  const auto train = lines(slurp(dir / "ml_train.data"));
  const auto test = lines(slurp(dir / "ml_test.data"));
  CHECK(train.size() + test.size() == n);
  CHECK(std::abs(static_cast<double>(train.size()) - 0.5 * static_cast<double>(n)) <= 0.5);

  const Result r = run("complete --ratings \"" + (dir / "ml_train.data").string() +
                       "\" --test \"" + (dir / "ml_test.data").string() +
                       "\" --kappa 2 --init-rank 5");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][kRe] == "nan");
  CHECK(rows[0][kTrueRank] == "nan");
  const double e = std::stod(rows[0][kNmae]);
  CHECK(e > 0.0);
  CHECK(e < 0.5);

  CHECK(run("complete --ratings \"" + (dir / "u.data").string() + "\" --kappa 2 --init-rank 0.5x")
            .code == 2);
  {
    std::ofstream bad(dir / "bad.data");
    bad << "1\t1\t5\t0\n1\tx\t3\t0\n";
  }
  const Result broken = run("movielens-prep --in \"" + (dir / "bad.data").string() + "\" --out-dir \"" +
                            dir.string() + "\"");
  CHECK(broken.code == 1);
  CHECK(broken.out.find("line 2") != std::string::npos);
}

TEST_CASE("bench: suites, counting contract and errors") {
  const fs::path dir = work("bench");
  const std::string out = " --out-dir \"" + dir.string() + "\" --stable";
  const Result t1 = run("bench table1 --m 40 --n 40 --rank 4 --seeds 5" + out);
  REQUIRE(t1.code == 0);
  CHECK(lines(slurp(dir / "table1_runs.csv")).size() == 101);
  const auto summary = lines(slurp(dir / "table1_summary.csv"));
  CHECK(summary.size() == 1 + 2 * 2 * 5);
  CHECK(t1.out.find("0.5r") != std::string::npos);
  CHECK(t1.out.find("1.5r") != std::string::npos);

  const Result pt = run("bench ptrend --m 40 --n 40 --rank 4 --seeds 2 --kappa 1,2" + out);
  REQUIRE(pt.code == 0);
  int best = 0;
  for (const std::string& l : lines(slurp(dir / "ptrend_summary.csv"))) {
    if (l.find(",best,") != std::string::npos) ++best;
  }
  CHECK(best == 4);
  CHECK(lines(slurp(dir / "ptrend_runs.csv")).size() == 1 + 4 * 2 * 2);

  const Result missing = run("bench movielens" + out);
  CHECK(missing.code == 2);
  CHECK(missing.out.find("--data") != std::string::npos);
  CHECK(run("bench nosuch" + out).code == 2);
  CHECK(run("bench table1 --lambda 1" + out).code == 2);

  varsp::standin::write_ratings(dir / "u.data", 80, 100, 0.15, 5);
  const Result ml = run("bench movielens --data \"" + (dir / "u.data").string() +
                        "\" --init-ranks 4,8 --p 0.5" + out);
  REQUIRE(ml.code == 0);
  const auto rows = csv_rows(slurp(dir / "movielens_runs.csv"));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(std::isfinite(std::stod(r[kNmae])));
}

}  // namespace
