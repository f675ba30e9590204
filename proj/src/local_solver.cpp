/*
 * Copyright 2026 The bcsl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bcsl/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcsl::solver {

namespace {

void check_problem(const SurrogateProblem& p) {
  if (p.data == nullptr) throw std::invalid_argument("solve_surrogate: no data");
  if (p.shard.empty()) throw std::invalid_argument("solve_surrogate: empty shard");
  const std::size_t d = p.data->cols();
  if (p.shift.size() != d) throw std::invalid_argument("solve_surrogate: shift has wrong length");
  if (p.anchor.size() != d) throw std::invalid_argument("solve_surrogate: anchor has wrong length");
  if (!(p.lambda >= 0.0)) throw std::invalid_argument("solve_surrogate: lambda must be >= 0");
}

// Evaluation state at one point: margins are cached so the gradient of an
// accepted trial point costs a single pass over the shard.
struct Point {
  std::vector<double> x;
  std::vector<double> z;
  double smooth = 0.0;
  double total = 0.0;
};

class SmoothEvaluator {
 public:
  explicit SmoothEvaluator(const SurrogateProblem& p) : p_(p) {}

  // Fills z, smooth and total for pt.x.
  void value(Point& pt) const {
    pt.z.resize(p_.shard.size());
    glm::kernels::margins(*p_.data, p_.shard, pt.x, pt.z);
    double v = glm::kernels::loss_from_margins(p_.model.family, *p_.data, p_.shard, pt.z);
    v -= dot(p_.shift, pt.x);
    if (p_.lambda > 0.0) {
      double sq = 0.0;
      for (std::size_t j = 0; j < pt.x.size(); ++j) {
        const double diff = pt.x[j] - p_.anchor[j];
        sq += diff * diff;
      }
      v += 0.5 * p_.lambda * sq;
    }
    pt.smooth = v;
    pt.total = v + glm::penalty_value(p_.penalty, pt.x);
    if (!std::isfinite(pt.total)) throw DivergenceError("divergent inner solve");
  }

  void gradient(const Point& pt, std::vector<double>& g) const {
    g.resize(pt.x.size());
    glm::kernels::gradient_from_margins(p_.model.family, *p_.data, p_.shard, pt.z, g);
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] -= p_.shift[j];
      if (p_.lambda > 0.0) g[j] += p_.lambda * (pt.x[j] - p_.anchor[j]);
    }
  }

 private:
  const SurrogateProblem& p_;
};

void prox_step(const glm::Penalty& g, std::span<const double> x,
               std::span<const double> grad, double step, std::vector<double>& out) {
  out.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] - step * grad[j];
  glm::prox_penalty_inplace(g, out, step);
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

double surrogate_smooth(const SurrogateProblem& problem, std::span<const double> theta) {
  check_problem(problem);
  Point pt;
  pt.x.assign(theta.begin(), theta.end());
  SmoothEvaluator(problem).value(pt);
  return pt.smooth;
}

double surrogate_objective(const SurrogateProblem& problem, std::span<const double> theta) {
  check_problem(problem);
  Point pt;
  pt.x.assign(theta.begin(), theta.end());
  SmoothEvaluator(problem).value(pt);
  return pt.total;
}

std::vector<double> surrogate_smooth_gradient(const SurrogateProblem& problem,
                                              std::span<const double> theta) {
  check_problem(problem);
  SmoothEvaluator eval(problem);
  Point pt;
  pt.x.assign(theta.begin(), theta.end());
  eval.value(pt);
  std::vector<double> g;
  eval.gradient(pt, g);
  return g;
}

bool design_rank_deficient(const Dataset& data, Shard shard) {
  const std::size_t d = data.cols();
  if (shard.size() < d) return true;
  const auto moments = glm::shard_moments(data, shard);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      gram(moments.sigma.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev.minCoeff() <= 1e-10 * std::max(ev.maxCoeff(), 1e-300);
}

SolveResult solve_surrogate(const SurrogateProblem& problem, const ParamVec& init,
                            const SolverOptions& opts) {
  check_problem(problem);
  if (init.size() != problem.data->cols())
    throw std::invalid_argument("solve_surrogate: init has wrong length");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_surrogate: tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("solve_surrogate: max_iter must be >= 1");

  const StepRule& rule = opts.step;
  const bool fixed = rule.kind == StepRule::Kind::fixed;
  if (fixed ? !(rule.fixed_step > 0.0)
            : !(rule.initial_step > 0.0 && rule.shrink > 0.0 && rule.shrink < 1.0))
    throw std::invalid_argument("solve_surrogate: bad step rule");

  SolveDiagnostics diag;
  if (problem.lambda == 0.0 && problem.penalty.kind == glm::Penalty::Kind::none) {
    diag.non_unique = problem.rank_deficient.has_value()
                          ? *problem.rank_deficient
                          : design_rank_deficient(*problem.data, problem.shard);
  }

  SmoothEvaluator eval(problem);
  Point cur;
  cur.x = init.vec();
  eval.value(cur);
  std::vector<double> grad;
  eval.gradient(cur, grad);
  if (opts.record_objective) diag.objective_trace.push_back(cur.total);

  Point trial;
  std::vector<double> prev_x, prev_grad;
  double step = fixed ? rule.fixed_step : rule.initial_step;

  for (;;) {
    if (!fixed && rule.bb_initial && !prev_x.empty()) {
      double sx = 0.0, sg = 0.0;
      for (std::size_t j = 0; j < grad.size(); ++j) {
        const double dx = cur.x[j] - prev_x[j];
        sx += dx * dx;
        sg += dx * (grad[j] - prev_grad[j]);
      }
      step = sg > 0.0 ? std::clamp(sx / sg, 1e-10, 1e10) : rule.initial_step;
    } else if (!fixed) {
      step = rule.initial_step;
    }

    prox_step(problem.penalty, cur.x, grad, step, trial.x);
    diag.residual = std::sqrt(sq_dist(trial.x, cur.x)) / step;
    if (diag.residual <= opts.tol) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= opts.max_iter) break;

    if (fixed) {
      eval.value(trial);
    } else {
      for (;;) {
        eval.value(trial);
        const double decrease = rule.sufficient_decrease / step * sq_dist(trial.x, cur.x);
        // Slack at rounding level so steps near the minimizer are not rejected
        // because f(trial) and f(cur) agree to the last bits.
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.total);
        if (trial.total <= cur.total - decrease + slack) break;
        step *= rule.shrink;
        if (step < 1e-30) break;
        prox_step(problem.penalty, cur.x, grad, step, trial.x);
      }
      if (step < 1e-30) break;  // no progress possible at machine precision
    }

    prev_x.swap(cur.x);
    prev_grad.swap(grad);
    std::swap(cur, trial);
    eval.gradient(cur, grad);
    ++diag.iterations;
    if (opts.record_objective) diag.objective_trace.push_back(cur.total);
  }

  diag.objective = cur.total;
  return {ParamVec(std::move(cur.x)), std::move(diag)};
}

ParamVec closed_form_ridge_update(const Eigen::MatrixXd& sigma1,
                                  std::span<const double> v_hat1,
                                  const ParamVec& theta_t,
                                  std::span<const double> h_t, double lambda) {
  const auto d = static_cast<Eigen::Index>(theta_t.size());
  if (sigma1.rows() != d || sigma1.cols() != d)
    throw std::invalid_argument("closed_form_ridge_update: sigma has wrong shape");
  if (h_t.size() != theta_t.size() || (!v_hat1.empty() && v_hat1.size() != theta_t.size()))
    throw std::invalid_argument("closed_form_ridge_update: vector length mismatch");
  if (!(lambda >= 0.0)) throw std::invalid_argument("closed_form_ridge_update: lambda must be >= 0");

  Eigen::MatrixXd a = sigma1;
  a.diagonal().array() += lambda;
  Eigen::Map<const Eigen::VectorXd> theta(theta_t.values().data(), d);
  Eigen::Map<const Eigen::VectorXd> h(h_t.data(), d);
  const Eigen::VectorXd rhs = a * theta - h;

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13)
    throw std::invalid_argument("singular system; increase lambda");
  const Eigen::VectorXd next = llt.solve(rhs);
  return ParamVec(std::vector<double>(next.data(), next.data() + d));
}

SolveResult centralized_minimizer(const glm::GlmModel& model,
                                  const glm::Penalty& penalty, const Dataset& data,
                                  const SolverOptions& opts, const ParamVec* init) {
  const auto all = data.all_indices();
  SurrogateProblem p{model, &data, all, std::vector<double>(data.cols(), 0.0),
                     penalty, 0.0, ParamVec(data.cols()), std::nullopt};
  return solve_surrogate(p, init ? *init : ParamVec(data.cols()), opts);
}

SolveResult shard_minimizer(const glm::GlmModel& model, const glm::Penalty& penalty,
                            const Dataset& data, Shard shard, double ridge,
                            const SolverOptions& opts) {
  SurrogateProblem p{model, &data, shard, std::vector<double>(data.cols(), 0.0),
                     penalty, ridge, ParamVec(data.cols()), std::nullopt};
  return solve_surrogate(p, ParamVec(data.cols()), opts);
}

}  // namespace bcsl::solver
