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

#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

namespace varsp::cli {
namespace {

std::string mult_label(double mult) { return format_number(mult) + "r"; }

SummaryRow summarize(const std::string& suite, const std::string& row, double p,
                     bool escape, double kappa,
                     const std::vector<const RunRecord*>& runs) {
  SummaryRow s;
  s.suite = suite;
  s.row = row;
  s.p = p;
  s.escape = escape;
  s.kappa = kappa;
  std::vector<double> re, rank, err;
  for (const RunRecord* r : runs) {
    ++s.runs;
    if (!r->error.empty()) {
      ++s.failures;
      continue;
    }
    re.push_back(r->re);
    rank.push_back(static_cast<double>(r->final_rank));
    err.push_back(r->nmae);
  }
  s.median_re = median(re);
  s.median_final_rank = median(rank);
  s.median_nmae = median(err);
  return s;
}

std::vector<Problem> instances(const SyntheticBench& b) {
  std::vector<Problem> out;
  for (int s = 1; s <= b.seeds; ++s) {
    SynthSpec spec;
    spec.m = b.m;
    spec.n = b.n;
    spec.rank = b.rank;
    spec.snr_db = b.snr_db;
    spec.missing_rate = b.missing;
    spec.seed = static_cast<std::uint64_t>(s);
    out.push_back(synthetic_problem(gen_synthetic(spec)));
  }
  return out;
}

Index init_rank(double mult, Index rank) {
  return std::max<Index>(1, static_cast<Index>(std::lround(mult * static_cast<double>(rank))));
}

// One run per (p, kappa, init multiplier, escape, seed), in that nesting
// order; summary rows per (row label, p, escape, kappa).
BenchResult run_grid(const std::string& suite, const SyntheticBench& b,
                     bool stable_timing, bool kappa_rows) {
  const std::vector<Problem> problems = instances(b);
  BenchResult res;
  struct Group {
    std::string row;
    double p;
    bool escape;
    double kappa;
    std::vector<std::size_t> idx;
  };
  std::vector<Group> groups;
  for (double p : b.ps) {
    for (double kappa : b.kappas) {
      for (double mult : b.init_mults) {
        for (bool esc : b.escapes) {
          Group g{kappa_rows ? "kappa=" + format_number(kappa) : mult_label(mult), p, esc,
                  kappa, {}};
          for (int s = 1; s <= b.seeds; ++s) {
            const Problem& pr = problems[static_cast<std::size_t>(s - 1)];
            RunSpec run;
            run.suite = suite;
            run.p = p;
            run.lambda = lambda_from_kappa(pr, kappa, p);
            run.init_rank = init_rank(mult, b.rank);
            run.escape = esc;
            run.seed = static_cast<std::uint64_t>(s);
            run.limits = b.limits;
            g.idx.push_back(res.runs.size());
            res.runs.push_back(execute(pr, run, stable_timing));
          }
          groups.push_back(std::move(g));
        }
      }
    }
  }
  for (const Group& g : groups) {
    std::vector<const RunRecord*> rs;
    for (std::size_t k : g.idx) rs.push_back(&res.runs[k]);
    res.summary.push_back(summarize(suite, g.row, g.p, g.escape, g.kappa, rs));
  }
  return res;
}

}  // namespace

SyntheticBench table1_defaults() {
  SyntheticBench b;
  b.ps = {0.5, 0.3};
  b.kappas = {1.5};
  b.init_mults = {0.5, 0.75, 1.0, 1.25, 1.5};
  b.escapes = {true, false};
  return b;
}

SyntheticBench ptrend_defaults() {
  SyntheticBench b;
  b.rank = 20;
  b.missing = 0.5;
  b.snr_db = 8.0;
  b.ps = {0.3, 0.5, 0.7, 1.0};
  b.kappas = {0.25, 0.5, 1.0, 2.0, 4.0};
  b.init_mults = {1.5};
  b.escapes = {true};
  return b;
}

BenchResult run_table1(const SyntheticBench& b, bool stable_timing) {
  return run_grid("table1", b, stable_timing, false);
}

BenchResult run_ptrend(const SyntheticBench& b, bool stable_timing) {
  BenchResult res = run_grid("ptrend", b, stable_timing, true);
  std::vector<SummaryRow> best;
  for (const SummaryRow& s : res.summary) {
    auto it = std::find_if(best.begin(), best.end(), [&](const SummaryRow& o) {
      return o.p == s.p && o.escape == s.escape;
    });
    if (it == best.end()) {
      best.push_back(s);
    } else if (!std::isnan(s.median_re) &&
               (std::isnan(it->median_re) || s.median_re < it->median_re)) {
      *it = s;
    }
  }
  for (SummaryRow& s : best) {
    s.row = "best";
    res.summary.push_back(s);
  }
  return res;
}

BenchResult run_movielens(const MovielensBench& b, bool stable_timing) {
  const Problem pr = ratings_problem(b.data, std::nullopt, b.train_frac, b.split_seed);
  BenchResult res;
  for (Index d0 : b.init_ranks) {
    for (double p : b.ps) {
      for (bool esc : b.escapes) {
        const double lambda = b.lambda ? *b.lambda : lambda_from_kappa(pr, b.kappa, p);
        std::vector<std::size_t> idx;
        for (int s = 1; s <= b.seeds; ++s) {
          RunSpec run;
          run.suite = "movielens";
          run.p = p;
          run.lambda = lambda;
          run.init_rank = d0;
          run.escape = esc;
          run.seed = static_cast<std::uint64_t>(s);
          run.limits = b.limits;
          idx.push_back(res.runs.size());
          res.runs.push_back(execute(pr, run, stable_timing));
        }
        std::vector<const RunRecord*> rs;
        for (std::size_t k : idx) rs.push_back(&res.runs[k]);
        res.summary.push_back(summarize("movielens", "d0=" + std::to_string(d0), p, esc,
                                        b.lambda ? std::numeric_limits<double>::quiet_NaN()
                                                 : b.kappa,
                                        rs));
      }
    }
  }
  return res;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "suite,row,p,escape,kappa,runs,failures,median_re,median_final_rank,median_nmae\n";
  for (const SummaryRow& s : rows) {
    out << s.suite << ',' << s.row << ',' << format_number(s.p) << ','
        << (s.escape ? "on" : "off") << ',' << format_number(s.kappa) << ',' << s.runs
        << ',' << s.failures << ',' << format_number(s.median_re) << ','
        << format_number(s.median_final_rank) << ',' << format_number(s.median_nmae)
        << '\n';
  }
}

void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::vector<std::string> labels;
  std::vector<std::pair<double, bool>> cols;
  std::map<std::pair<std::string, std::pair<double, bool>>, const SummaryRow*> cell;
  for (const SummaryRow& s : rows) {
    if (std::find(labels.begin(), labels.end(), s.row) == labels.end())
      labels.push_back(s.row);
    const std::pair<double, bool> c{s.p, s.escape};
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    cell[{s.row, c}] = &s;
  }
  const bool ratings = !rows.empty() && std::isnan(rows.front().median_re);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "init/row");
  out << buf;
  for (const auto& [p, esc] : cols) {
    std::snprintf(buf, sizeof buf, " | p=%-4g esc=%-3s   ", p, esc ? "on" : "off");
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%-12s", "");
  out << buf;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    std::snprintf(buf, sizeof buf, " | %-8s %-9s", ratings ? "NMAE" : "RE", "rank");
    out << buf;
  }
  out << '\n';
  for (const std::string& label : labels) {
    std::snprintf(buf, sizeof buf, "%-12s", label.c_str());
    out << buf;
    for (const auto& c : cols) {
      const auto it = cell.find({label, c});
      if (it == cell.end()) {
        std::snprintf(buf, sizeof buf, " | %-8s %-9s", "-", "-");
      } else {
        const SummaryRow& s = *it->second;
        std::snprintf(buf, sizeof buf, " | %-8.4f %-9g", ratings ? s.median_nmae : s.median_re,
                      s.median_final_rank);
      }
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace varsp::cli
