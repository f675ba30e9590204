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

#ifndef BCSL_GLM_HPP
#define BCSL_GLM_HPP

#include <span>
#include <string_view>
#include <vector>

#include "bcsl/core.hpp"

namespace bcsl::glm {

enum class Family { logistic, linear };

/// Per-sample loss l(theta; x, y):
///   logistic  b(x'theta) - y x'theta,  b(t) = log(1 + e^t), y in {0, 1}
///   linear    (y - x'theta)^2 / 2
/// `fit_intercept` records that column 0 of the data is the constant 1.
struct GlmModel {
  Family family = Family::logistic;
  bool fit_intercept = true;
};

/// g(theta). l2sq is (gamma / 2) ||theta||^2, so its prox is a plain
/// shrinkage v / (1 + gamma step); l1 is gamma ||theta||_1.
struct Penalty {
  enum class Kind { none, l2sq, l1 };
  Kind kind = Kind::none;
  double gamma = 0.0;

  static Penalty none() { return {}; }
  static Penalty l2sq(double gamma);
  static Penalty l1(double gamma);
};

Family parse_family(std::string_view name);
std::string_view to_string(Family f);
Penalty::Kind parse_penalty_kind(std::string_view name);
std::string_view to_string(Penalty::Kind k);

// b(t) and b'(t) for each family; logistic uses the overflow-free forms.
double log1pexp(double t);
double sigmoid(double t);

// Shard-averaged loss f_k(theta) = (1/|I_k|) sum_{i in I_k} l(theta; Z_i).
double loss_value(const GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard);

// Shard-averaged gradient (1/|I_k|) sum [b'(x_i'theta) - y_i] x_i.
ParamVec gradient(const GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard);

double penalty_value(const Penalty& g, std::span<const double> theta);

// argmin_x { g(x) + ||x - v||^2 / (2 step) }.
ParamVec prox_penalty(const Penalty& g, std::span<const double> v, double step);
void prox_penalty_inplace(const Penalty& g, std::span<double> v, double step);

/// OpenMP kernels behind loss_value / gradient. Reductions are split into
/// fixed-size row blocks that are summed in block order, so the result does
/// not depend on the thread count.
namespace kernels {

inline constexpr std::size_t kRowBlock = 256;

// z_i = x_i' theta for every row of the shard.
void margins(const Dataset& data, Shard shard, std::span<const double> theta,
             std::span<double> z);

double loss_from_margins(Family family, const Dataset& data, Shard shard,
                         std::span<const double> z);

void gradient_from_margins(Family family, const Dataset& data, Shard shard,
                           std::span<const double> z, std::span<double> grad);

}  // namespace kernels

// Shard first and second moments: Sigma = X'X / n, v = X'y / n.
struct ShardMoments {
  std::vector<double> sigma;  // d x d row-major
  std::vector<double> v;
  std::size_t dim = 0;
};
ShardMoments shard_moments(const Dataset& data, Shard shard);

// Average Hessian (1/n) sum b''(x_i'theta) x_i x_i' (row-major d x d).
std::vector<double> hessian(const GlmModel& model, std::span<const double> theta,
                            const Dataset& data, Shard shard);

// Fraction of misclassified rows with the rule 1{x'theta >= 0}.
double classification_error(std::span<const double> theta, const Dataset& data,
                            Shard shard);

}  // namespace bcsl::glm

#endif  // BCSL_GLM_HPP
