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

// Statistical error floors of the median and trimmed-mean variants, and the
// lambda rules for the proximal variant, as plain numeric diagnostics.

#ifndef BCSL_THEORY_HPP
#define BCSL_THEORY_HPP

#include <cstddef>

#include "bcsl/core.hpp"
#include "bcsl/glm.hpp"

namespace bcsl::theory {

/// Constants of the moment and smoothness conditions.
///   V         gradient standard-deviation bound (V^2 I > Var grad l)
///   S         coordinate-wise skewness bound
///   upsilon   sub-exponential scale of the partial derivatives
///   L_tilde   sqrt(sum_k L_k^2), L_k the Lipschitz constant of d_k l
///   D         diameter of the parameter domain
///   epsilon   slack in (0, 1/2)
///   rho       strong convexity of f + g
///   delta     ||Hess f_1 - Hess F|| bound
struct TheoryParams {
  double V = 1.0;
  double S = 1.0;
  double upsilon = 1.0;
  double L_tilde = 1.0;
  double D = 10.0;
  double epsilon = 1.0 / 6.0;
  double rho = 1.0;
  double delta = 0.0;

  void validate() const;
};

// Standard normal CDF and its inverse (rational approximation plus one
// Halley refinement; |error| well below 1e-9 on (1e-300, 1 - 1e-16)).
double normal_cdf(double x);
double inverse_normal_cdf(double p);

// C_eps = sqrt(2 pi) exp(Phi^{-1}(1 - eps)^2 / 2), 0 < eps < 1/2.
double c_epsilon(double epsilon);

struct BoundReport {
  double bound = 0.0;
  // Left side of the admissibility condition and the limit it must not exceed.
  double feasibility_lhs = 0.0;
  double feasibility_limit = 0.0;
  bool feasible = false;
  // Order of the unspecified remainder (beta/n + 1/(nm)); never added to
  // `bound`. Zero for the median bound.
  double remainder_order = 0.0;
};

// log(1 + n (m + 1) L_tilde D)
double log_cover_term(std::size_t n, std::size_t m, const TheoryParams& params);

/// Median floor:
///   2 sqrt2 / ((m+1) n) + sqrt2 C_eps V / sqrt n * A,
///   A = alpha + sqrt(p log(1 + n(m+1) L D) / (m (1 - alpha))) + 0.4748 S / sqrt n
/// feasible iff A <= 1/2 - eps.
BoundReport delta_nm_alpha(std::size_t n, std::size_t m, double alpha,
                           const TheoryParams& params, std::size_t p);

/// Trimmed-mean floor (leading term):
///   (upsilon p / eps) (3 sqrt2 beta / sqrt n + 2 / sqrt(n m))
///     * sqrt(log(1 + n(m+1) L D) + log(1 + m) / p)
/// feasible iff alpha <= beta <= 1/2 - eps (alpha defaults to beta).
BoundReport delta_nm_beta(std::size_t n, std::size_t m, double beta,
                          const TheoryParams& params, std::size_t p,
                          double alpha = -1.0);

enum class LambdaRegime { glm_default, linear_pn };

// glm_default: c delta^2 / rho. linear_pn: c p / n.
double suggest_lambda_glm(double delta, double rho, double c = 1.0);
double suggest_lambda_linear(std::size_t p, std::size_t n, double c = 1.0);

// Largest alpha on a grid of `steps` points in [0, 1/2) that satisfies the
// median admissibility condition; -1 when none does.
double max_feasible_alpha(std::size_t n, std::size_t m, const TheoryParams& params,
                          std::size_t p, int steps = 5000);

/// Empirical stand-ins for V, S, upsilon and L_tilde from per-sample
/// gradients at theta over the given rows. These are estimates, not
/// certified bounds.
TheoryParams estimate_params(const glm::GlmModel& model, const Dataset& data,
                             Shard rows, std::span<const double> theta,
                             double epsilon, double D);

/// rho = smallest eigenvalue of the full-data Hessian (plus the l2sq
/// penalty curvature) and delta = ||Hess f_1 - Hess f||_2 at theta.
struct Homogeneity {
  double rho = 0.0;
  double delta = 0.0;
};
Homogeneity estimate_homogeneity(const glm::GlmModel& model,
                                 const glm::Penalty& penalty, const Dataset& data,
                                 Shard master, Shard all_rows,
                                 std::span<const double> theta);

}  // namespace bcsl::theory

#endif  // BCSL_THEORY_HPP
