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

#include "bcsl/serial_reference.hpp"

#include <algorithm>
#include <stdexcept>

#include "bcsl/robust_agg.hpp"

namespace bcsl::serial {

double loss_value(const glm::GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard) {
  if (shard.empty() || theta.size() != data.cols())
    throw std::invalid_argument("serial::loss_value: bad arguments");
  double total = 0.0;
  for (auto i : shard) {
    const double z = dot(data.row(i), theta);
    const double y = data.label(i);
    if (model.family == glm::Family::logistic)
      total += glm::log1pexp(z) - y * z;
    else
      total += 0.5 * (y - z) * (y - z);
  }
  return total / static_cast<double>(shard.size());
}

std::vector<double> gradient(const glm::GlmModel& model,
                             std::span<const double> theta, const Dataset& data,
                             Shard shard) {
  if (shard.empty() || theta.size() != data.cols())
    throw std::invalid_argument("serial::gradient: bad arguments");
  std::vector<double> g(data.cols(), 0.0);
  for (auto i : shard) {
    const auto x = data.row(i);
    const double z = dot(x, theta);
    const double mu = model.family == glm::Family::logistic ? glm::sigmoid(z) : z;
    const double r = mu - data.label(i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += r * x[j];
  }
  for (auto& v : g) v /= static_cast<double>(shard.size());
  return g;
}

std::vector<double> coord_median(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) throw std::invalid_argument("serial::coord_median: empty");
  const std::size_t d = vectors.front().size();
  const std::size_t m = vectors.size();
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> col;
    for (const auto& v : vectors) col.push_back(v.at(k));
    std::sort(col.begin(), col.end());
    out[k] = m % 2 ? col[m / 2] : (col[m / 2 - 1] + col[m / 2]) / 2.0;
  }
  return out;
}

std::vector<double> coord_trimmed_mean(std::span<const std::vector<double>> vectors,
                                       double beta) {
  if (vectors.empty()) throw std::invalid_argument("serial::coord_trimmed_mean: empty");
  const std::size_t d = vectors.front().size();
  const std::size_t m = vectors.size();
  const std::size_t k = agg::trim_count(beta, m);
  std::vector<double> out(d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> col;
    for (const auto& v : vectors) col.push_back(v.at(c));
    std::sort(col.begin(), col.end());
    if (col[k] == col[m - k - 1]) {
      out[c] = col[k];
      continue;
    }
    double s = 0.0;
    for (std::size_t i = k; i < m - k; ++i) s += col[i];
    out[c] = s / static_cast<double>(m - 2 * k);
  }
  return out;
}

}  // namespace bcsl::serial
