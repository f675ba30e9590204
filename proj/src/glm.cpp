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

#include "bcsl/glm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcsl::glm {

namespace {

void check_args(std::span<const double> theta, const Dataset& data, Shard shard) {
  if (shard.empty()) throw std::invalid_argument("glm: empty shard");
  if (theta.size() != data.cols())
    throw std::invalid_argument("glm: dimension mismatch between theta (" +
                                std::to_string(theta.size()) + ") and data (" +
                                std::to_string(data.cols()) + ")");
}

inline double row_dot(std::span<const double> x, std::span<const double> theta) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * theta[j];
  return s;
}

inline double sample_loss(Family family, double z, double y) {
  if (family == Family::logistic) return log1pexp(z) - y * z;
  const double r = y - z;
  return 0.5 * r * r;
}

inline double residual(Family family, double z, double y) {
  return (family == Family::logistic ? sigmoid(z) : z) - y;
}

std::size_t num_blocks(std::size_t n) {
  return (n + kernels::kRowBlock - 1) / kernels::kRowBlock;
}

}  // namespace

Penalty Penalty::l2sq(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("Penalty: gamma must be >= 0");
  return {Kind::l2sq, gamma};
}

Penalty Penalty::l1(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("Penalty: gamma must be >= 0");
  return {Kind::l1, gamma};
}

Family parse_family(std::string_view name) {
  if (name == "logistic") return Family::logistic;
  if (name == "linear") return Family::linear;
  throw std::invalid_argument("unknown GLM family: " + std::string(name));
}

std::string_view to_string(Family f) {
  return f == Family::logistic ? "logistic" : "linear";
}

Penalty::Kind parse_penalty_kind(std::string_view name) {
  if (name == "none") return Penalty::Kind::none;
  if (name == "l2sq") return Penalty::Kind::l2sq;
  if (name == "l1") return Penalty::Kind::l1;
  throw std::invalid_argument("unknown penalty kind: " + std::string(name));
}

std::string_view to_string(Penalty::Kind k) {
  switch (k) {
    case Penalty::Kind::none: return "none";
    case Penalty::Kind::l2sq: return "l2sq";
    case Penalty::Kind::l1: return "l1";
  }
  return "none";
}

double log1pexp(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace kernels {

void margins(const Dataset& data, Shard shard, std::span<const double> theta,
             std::span<double> z) {
  const auto n = static_cast<std::ptrdiff_t>(shard.size());
#pragma omp parallel for schedule(static) if (n >= 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] = row_dot(data.row(shard[static_cast<std::size_t>(i)]), theta);
}

double loss_from_margins(Family family, const Dataset& data, Shard shard,
                         std::span<const double> z) {
  const std::size_t n = shard.size();
  const std::size_t nb = num_blocks(n);
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static) if (nb >= 8)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kRowBlock;
    const std::size_t hi = std::min(n, lo + kRowBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += sample_loss(family, z[i], data.label(shard[i]));
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total / static_cast<double>(n);
}

void gradient_from_margins(Family family, const Dataset& data, Shard shard,
                           std::span<const double> z, std::span<double> grad) {
  const std::size_t n = shard.size();
  const std::size_t d = data.cols();
  const std::size_t nb = num_blocks(n);
  std::fill(grad.begin(), grad.end(), 0.0);
  if (nb == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residual(family, z[i], data.label(shard[i]));
      const auto x = data.row(shard[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
    }
  } else {
    std::vector<double> partial(nb * d, 0.0);
#pragma omp parallel for schedule(static) if (nb >= 8)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kRowBlock;
      const std::size_t hi = std::min(n, lo + kRowBlock);
      double* acc = partial.data() + static_cast<std::size_t>(b) * d;
      for (std::size_t i = lo; i < hi; ++i) {
        const double r = residual(family, z[i], data.label(shard[i]));
        const auto x = data.row(shard[i]);
        for (std::size_t j = 0; j < d; ++j) acc[j] += r * x[j];
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      const double* acc = partial.data() + b * d;
      for (std::size_t j = 0; j < d; ++j) grad[j] += acc[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& g : grad) g *= inv_n;
}

}  // namespace kernels

double loss_value(const GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard) {
  check_args(theta, data, shard);
  std::vector<double> z(shard.size());
  kernels::margins(data, shard, theta, z);
  return kernels::loss_from_margins(model.family, data, shard, z);
}

ParamVec gradient(const GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard) {
  check_args(theta, data, shard);
  std::vector<double> z(shard.size());
  kernels::margins(data, shard, theta, z);
  std::vector<double> g(data.cols());
  kernels::gradient_from_margins(model.family, data, shard, z, g);
  return ParamVec(std::move(g));
}

double penalty_value(const Penalty& g, std::span<const double> theta) {
  switch (g.kind) {
    case Penalty::Kind::none:
      return 0.0;
    case Penalty::Kind::l2sq: {
      double s = 0.0;
      for (double x : theta) s += x * x;
      return 0.5 * g.gamma * s;
    }
    case Penalty::Kind::l1:
      return g.gamma * l1_norm(theta);
  }
  return 0.0;
}

void prox_penalty_inplace(const Penalty& g, std::span<double> v, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("prox_penalty: step must be > 0");
  switch (g.kind) {
    case Penalty::Kind::none:
      return;
    case Penalty::Kind::l2sq: {
      const double shrink = 1.0 / (1.0 + g.gamma * step);
      for (auto& x : v) x *= shrink;
      return;
    }
    case Penalty::Kind::l1: {
      const double thr = g.gamma * step;
      for (auto& x : v) {
        const double mag = std::abs(x) - thr;
        x = mag > 0.0 ? std::copysign(mag, x) : 0.0;
      }
      return;
    }
  }
}

ParamVec prox_penalty(const Penalty& g, std::span<const double> v, double step) {
  std::vector<double> out(v.begin(), v.end());
  prox_penalty_inplace(g, out, step);
  return ParamVec(std::move(out));
}

ShardMoments shard_moments(const Dataset& data, Shard shard) {
  if (shard.empty()) throw std::invalid_argument("shard_moments: empty shard");
  const std::size_t d = data.cols();
  ShardMoments m{std::vector<double>(d * d, 0.0), std::vector<double>(d, 0.0), d};
  for (auto i : shard) {
    const auto x = data.row(i);
    const double y = data.label(i);
    for (std::size_t a = 0; a < d; ++a) {
      m.v[a] += x[a] * y;
      for (std::size_t b = a; b < d; ++b) m.sigma[a * d + b] += x[a] * x[b];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(shard.size());
  for (std::size_t a = 0; a < d; ++a) {
    m.v[a] *= inv_n;
    for (std::size_t b = a; b < d; ++b) {
      m.sigma[a * d + b] *= inv_n;
      m.sigma[b * d + a] = m.sigma[a * d + b];
    }
  }
  return m;
}

std::vector<double> hessian(const GlmModel& model, std::span<const double> theta,
                            const Dataset& data, Shard shard) {
  check_args(theta, data, shard);
  const std::size_t d = data.cols();
  std::vector<double> h(d * d, 0.0);
  for (auto i : shard) {
    const auto x = data.row(i);
    double w = 1.0;
    if (model.family == Family::logistic) {
      const double s = sigmoid(row_dot(x, theta));
      w = s * (1.0 - s);
    }
    for (std::size_t a = 0; a < d; ++a) {
      const double wa = w * x[a];
      for (std::size_t b = a; b < d; ++b) h[a * d + b] += wa * x[b];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(shard.size());
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      h[a * d + b] *= inv_n;
      h[b * d + a] = h[a * d + b];
    }
  return h;
}

double classification_error(std::span<const double> theta, const Dataset& data,
                            Shard shard) {
  check_args(theta, data, shard);
  std::size_t wrong = 0;
  for (auto i : shard) {
    const double predicted = row_dot(data.row(i), theta) >= 0.0 ? 1.0 : 0.0;
    if (predicted != data.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(shard.size());
}

}  // namespace bcsl::glm
