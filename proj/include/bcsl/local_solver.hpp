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

#ifndef BCSL_LOCAL_SOLVER_HPP
#define BCSL_LOCAL_SOLVER_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "bcsl/core.hpp"
#include "bcsl/glm.hpp"

namespace bcsl::solver {

struct StepRule {
  enum class Kind { backtracking, fixed };
  Kind kind = Kind::backtracking;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  // Start each line search from the Barzilai-Borwein step instead of
  // initial_step. The acceptance test is unchanged, so descent stays monotone.
  bool bb_initial = true;
  double fixed_step = 0.1;
};

struct SolverOptions {
  double tol = 1e-8;  // bound on the prox-gradient residual norm
  int max_iter = 500;
  StepRule step;
  bool record_objective = false;
};

/// The master's per-round problem
///   min_theta  f_1(theta) - <shift, theta> + g(theta)
///              + (lambda / 2) ||theta - anchor||^2
/// with f_1 the shard-averaged loss. lambda = 0 gives the unregularized
/// surrogate; lambda > 0 the proximal variant.
struct SurrogateProblem {
  glm::GlmModel model;
  const Dataset* data = nullptr;
  Shard shard;
  std::vector<double> shift;
  glm::Penalty penalty;
  double lambda = 0.0;
  ParamVec anchor;
  // Precomputed rank test of the shard design; computed on demand when unset.
  std::optional<bool> rank_deficient;
};

struct SolveDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  // Zero curvature along some direction with lambda = 0 and no penalty, so
  // the minimizer (if any) is not unique.
  bool non_unique = false;
  std::vector<double> objective_trace;
};

struct SolveResult {
  ParamVec theta;
  SolveDiagnostics diagnostics;
};

double surrogate_objective(const SurrogateProblem& problem,
                           std::span<const double> theta);

// Smooth part only (everything except g).
double surrogate_smooth(const SurrogateProblem& problem,
                        std::span<const double> theta);
std::vector<double> surrogate_smooth_gradient(const SurrogateProblem& problem,
                                              std::span<const double> theta);

/// Proximal gradient with backtracking. Stops once
///   || theta - prox_{s g}(theta - s grad smooth(theta)) || / s <= tol
/// or after max_iter iterations (converged = false).
/// Throws DivergenceError on a non-finite objective.
SolveResult solve_surrogate(const SurrogateProblem& problem, const ParamVec& init,
                            const SolverOptions& opts);

/// Linear family, g = 0: solves (Sigma_1 + lambda I) theta_{t+1} =
/// (Sigma_1 + lambda I) theta_t - h_t with a Cholesky factorization.
/// v_hat1 only enters through h_t and is accepted for signature symmetry.
ParamVec closed_form_ridge_update(const Eigen::MatrixXd& sigma1,
                                  std::span<const double> v_hat1,
                                  const ParamVec& theta_t,
                                  std::span<const double> h_t, double lambda);

/// argmin f(theta) + g(theta) over every row of `data` (the single-machine
/// reference estimate).
SolveResult centralized_minimizer(const glm::GlmModel& model,
                                  const glm::Penalty& penalty, const Dataset& data,
                                  const SolverOptions& opts,
                                  const ParamVec* init = nullptr);

/// argmin f_k(theta) + g(theta) + (ridge / 2) ||theta||^2 on one shard.
SolveResult shard_minimizer(const glm::GlmModel& model, const glm::Penalty& penalty,
                            const Dataset& data, Shard shard, double ridge,
                            const SolverOptions& opts);

// True when X_S' X_S / |S| has a (numerically) zero eigenvalue.
bool design_rank_deficient(const Dataset& data, Shard shard);

}  // namespace bcsl::solver

#endif  // BCSL_LOCAL_SOLVER_HPP
