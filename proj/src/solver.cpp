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

#include "varsp/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "varsp/escape.hpp"
#include "varsp/random.hpp"

namespace varsp {

void SolverConfig::validate() const {
  (void)PExponent(p);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0");
  }
  if (init_width < 1) throw std::invalid_argument("init_width must be >= 1");
  if (!(prune_thres > 0.0)) {
    throw std::invalid_argument("prune_thres must be > 0");
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(conv_tol > 0.0)) throw std::invalid_argument("conv_tol must be > 0");
  if (escape_check_max && *escape_check_max < 0) {
    throw std::invalid_argument("escape_check_max must be >= 0");
  }
}

double objective(const ObservedMatrix& y, const Factors& f,
                 const SolverConfig& cfg) {
  return loss_value(y, f) + cfg.lambda * variational_sum(f, PExponent(cfg.p));
}

Vector reweighting(const Factors& f, double p) {
  const Vector c = f.column_energy();
  Vector w(c.size());
  for (Index i = 0; i < c.size(); ++i) {
    if (!(c(i) > 0.0)) {
      throw std::domain_error("column " + std::to_string(i) +
                              " is zero; prune before taking a step");
    }
    w(i) = p * std::pow(c(i), p - 1.0);
  }
  return w;
}

namespace {

// Residual values in entries() order.
std::vector<double> residual_values(const ObservedMatrix& y,
                                    const Factors& f) {
  std::vector<double> r = predict(y, f);
  const auto entries = y.entries();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = entries[k].value - r[k];
  return r;
}

DenseMatrix checked_hessian(DenseMatrix h, const char* which) {
  const double trace = h.trace();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      Eigen::MatrixXd(h), Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > 1e-12 * trace)) {
    throw std::domain_error(
        std::string(which) +
        " surrogate Hessian is numerically singular (min eigenvalue " +
        std::to_string(smallest) + "); prune columns or use lambda > 0");
  }
  return h;
}

}  // namespace

DenseMatrix grad_u(const ObservedMatrix& y, const Factors& f,
                   const SolverConfig& cfg) {
  const Vector w = reweighting(f, cfg.p);
  DenseMatrix g = cfg.lambda * (f.u * w.asDiagonal());
  const std::vector<double> r = residual_values(y, f);
  const auto entries = y.entries();
  for (std::size_t k = 0; k < r.size(); ++k) {
    g.row(entries[k].row) -= r[k] * f.v.row(entries[k].col);
  }
  return g;
}

DenseMatrix grad_v(const ObservedMatrix& y, const Factors& f,
                   const SolverConfig& cfg) {
  const Vector w = reweighting(f, cfg.p);
  DenseMatrix g = cfg.lambda * (f.v * w.asDiagonal());
  const std::vector<double> r = residual_values(y, f);
  const auto entries = y.entries();
  for (std::size_t k = 0; k < r.size(); ++k) {
    g.row(entries[k].col) -= r[k] * f.u.row(entries[k].row);
  }
  return g;
}

DenseMatrix surrogate_hessian_u(const Factors& f, const SolverConfig& cfg) {
  const Vector w = reweighting(f, cfg.p);
  DenseMatrix h = f.v.transpose() * f.v;
  h.diagonal() += cfg.lambda * w;
  return checked_hessian(std::move(h), "U");
}

DenseMatrix surrogate_hessian_v(const Factors& f, const SolverConfig& cfg) {
  const Vector w = reweighting(f, cfg.p);
  DenseMatrix h = f.u.transpose() * f.u;
  h.diagonal() += cfg.lambda * w;
  return checked_hessian(std::move(h), "V");
}

namespace {

// x - g h^-1 for symmetric positive definite h.
DenseMatrix newton_like_update(const DenseMatrix& x, const DenseMatrix& g,
                               const DenseMatrix& h) {
  const Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(h)};
  const Eigen::MatrixXd step = llt.solve(Eigen::MatrixXd(g.transpose()));
  return x - step.transpose();
}

}  // namespace

Factors bsum_step(const ObservedMatrix& y, const Factors& f,
                  const SolverConfig& cfg) {
  Factors next = f;
  next.u = newton_like_update(f.u, grad_u(y, f, cfg),
                              surrogate_hessian_u(f, cfg));
  next.v = newton_like_update(f.v, grad_v(y, next, cfg),
                              surrogate_hessian_v(next, cfg));
  return next;
}

Factors prune(const Factors& f, double thres) {
  const Vector un = f.u.colwise().norm().transpose();
  const Vector vn = f.v.colwise().norm().transpose();
  std::vector<Index> keep;
  for (Index i = 0; i < f.width(); ++i) {
    if (un(i) > thres && vn(i) > thres) keep.push_back(i);
  }
  if (keep.size() == static_cast<std::size_t>(f.width())) return f;
  if (keep.empty()) return Factors::zeros(f.rows(), f.cols(), 1);
  const auto d = static_cast<Index>(keep.size());
  Factors out = Factors::zeros(f.rows(), f.cols(), d);
  for (Index c = 0; c < d; ++c) {
    out.u.col(c) = f.u.col(keep[static_cast<std::size_t>(c)]);
    out.v.col(c) = f.v.col(keep[static_cast<std::size_t>(c)]);
  }
  return out;
}

bool is_empty_model(const Factors& f) {
  return f.width() == 1 && f.u.isZero(0.0) && f.v.isZero(0.0);
}

Factors random_init(const ObservedMatrix& y, const SolverConfig& cfg) {
  const auto m = static_cast<double>(y.rows());
  const auto n = static_cast<double>(y.cols());
  const auto d = static_cast<double>(cfg.init_width);
  double target = 0.0;
  if (!y.empty()) {
    target = y.frobenius_norm() * std::sqrt(m * n / static_cast<double>(y.size()));
  }
  // |U V^T|_F ~ s^2 sqrt(m n d) for i.i.d. N(0, s^2) entries.
  const double scale =
      target > 0.0 ? std::sqrt(target / std::sqrt(m * n * d)) : 1.0;
  Rng rng = Rng(cfg.seed).split("init");
  Factors f = Factors::zeros(y.rows(), y.cols(), cfg.init_width);
  for (Index i = 0; i < f.u.rows(); ++i) {
    for (Index c = 0; c < f.u.cols(); ++c) f.u(i, c) = scale * rng.normal();
  }
  for (Index j = 0; j < f.v.rows(); ++j) {
    for (Index c = 0; c < f.v.cols(); ++c) f.v(j, c) = scale * rng.normal();
  }
  return f;
}

double relative_change(const Factors& prev, const Factors& next) {
  // |A B^T|_F^2 = sum((A^T A) .* (B^T B)) with A = [U1 U0], B = [V1 -V0].
  DenseMatrix a(prev.rows(), next.width() + prev.width());
  a << next.u, prev.u;
  DenseMatrix b(prev.cols(), next.width() + prev.width());
  b << next.v, -prev.v;
  const double diff2 =
      ((a.transpose() * a).cwiseProduct(b.transpose() * b)).sum();
  const double base2 = ((prev.u.transpose() * prev.u)
                            .cwiseProduct(prev.v.transpose() * prev.v))
                           .sum();
  const double diff = std::sqrt(std::max(diff2, 0.0));
  const double base = std::sqrt(std::max(base2, 0.0));
  return base > 0.0 ? diff / base : diff;
}

SolveResult solve(const ObservedMatrix& y, const SolverConfig& cfg) {
  cfg.validate();
  return solve(y, cfg, random_init(y, cfg));
}

SolveResult solve(const ObservedMatrix& y, const SolverConfig& cfg,
                  Factors init) {
  cfg.validate();
  if (y.empty()) throw std::invalid_argument("solve: no observations");
  if (init.rows() != y.rows() || init.cols() != y.cols()) {
    throw std::invalid_argument("solve: initial factors have the wrong shape");
  }
  if (init.width() != cfg.init_width) {
    throw std::invalid_argument("solve: initial width " +
                                std::to_string(init.width()) +
                                " differs from init_width " +
                                std::to_string(cfg.init_width));
  }

  SolveResult out;
  SolveReport& report = out.report;
  Factors f = prune(init, cfg.prune_thres);
  report.objective_trace.push_back(objective(y, f, cfg));

  const int budget = cfg.escape_budget();
  bool converged = false;
  while (report.iters < cfg.max_iter) {
    if (is_empty_model(f)) {
      converged = true;
      report.last_rel_change = 0.0;
    } else {
      Factors next = prune(bsum_step(y, f, cfg), cfg.prune_thres);
      report.last_rel_change = relative_change(f, next);
      f = std::move(next);
      ++report.iters;
      report.objective_trace.push_back(objective(y, f, cfg));
      converged = report.last_rel_change < cfg.conv_tol;
    }
    if (!converged) continue;
    if (!cfg.escape_enabled || report.escapes >= budget) break;

    EscapeResult esc = attempt_escape(y, f, cfg);
    if (esc.decision.rolled_back) ++report.rollbacks;
    if (!esc.decision.accepted || esc.decision.rolled_back) break;

    EscapeEvent ev;
    ev.iter = report.iters;
    ev.sigma = esc.decision.sigma;
    ev.tau = esc.decision.tau;
    ev.objective_before = report.objective_trace.back();
    f = std::move(esc.factors);
    ev.objective_after = objective(y, f, cfg);
    report.objective_trace.push_back(ev.objective_after);
    report.escape_trace_index.push_back(report.objective_trace.size() - 1);
    report.escape_events.push_back(ev);
    ++report.escapes;
    converged = false;
  }

  report.converged = converged;
  report.final_width = is_empty_model(f) ? 0 : f.width();
  out.factors = std::move(f);
  return out;
}

}  // namespace varsp
