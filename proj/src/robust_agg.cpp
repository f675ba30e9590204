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

#include "bcsl/robust_agg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bcsl/core.hpp"

namespace bcsl::agg {

namespace {

std::size_t check_inputs(VectorList vectors) {
  if (vectors.empty()) throw std::invalid_argument("aggregate: empty vector list");
  const std::size_t d = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != d) throw std::invalid_argument("aggregate: ragged vector lengths");
    for (double x : v)
      if (std::isnan(x)) throw std::invalid_argument("aggregate: NaN entry");
  }
  return d;
}

// Runs `reduce` on the sorted column of every coordinate. Coordinates are
// independent, so any schedule gives the same bits.
template <typename Reduce>
std::vector<double> per_coordinate(VectorList vectors, Reduce reduce) {
  const std::size_t d = check_inputs(vectors);
  const std::size_t m = vectors.size();
  std::vector<double> out(d);
#pragma omp parallel if (d * m >= 16384)
  {
    std::vector<double> column(m);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(d); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      for (std::size_t i = 0; i < m; ++i) column[i] = vectors[i][kk];
      std::sort(column.begin(), column.end());
      out[kk] = reduce(std::span<const double>(column));
    }
  }
  return out;
}

// Mean of an ascending slice, summed front to back.
double sorted_mean(std::span<const double> sorted) {
  if (sorted.front() == sorted.back()) return sorted.front();
  double s = 0.0;
  for (double x : sorted) s += x;
  return s / static_cast<double>(sorted.size());
}

}  // namespace

std::size_t trim_count(double beta, std::size_t m) {
  return floor_fraction(beta, m);
}

void AggRule::validate(std::size_t m) const {
  if (m == 0) throw std::invalid_argument("AggRule: no worker reports");
  if (kind != Kind::trimmed) return;
  if (!(beta >= 0.0 && beta < 0.5))
    throw std::invalid_argument("AggRule: trimmed mean needs 0 <= beta < 1/2");
  if (m <= 2 * trim_count(beta, m))
    throw std::invalid_argument("AggRule: trimming removes every report");
}

AggRule::Kind parse_rule(std::string_view name) {
  if (name == "mean" || name == "me") return AggRule::Kind::mean;
  if (name == "median" || name == "md") return AggRule::Kind::median;
  if (name == "trimmed" || name == "tr") return AggRule::Kind::trimmed;
  throw std::invalid_argument("unknown aggregation rule: " + std::string(name));
}

std::string_view to_string(AggRule::Kind kind) {
  switch (kind) {
    case AggRule::Kind::mean: return "mean";
    case AggRule::Kind::median: return "median";
    case AggRule::Kind::trimmed: return "trimmed";
  }
  return "mean";
}

std::string_view short_name(AggRule::Kind kind) {
  switch (kind) {
    case AggRule::Kind::mean: return "me";
    case AggRule::Kind::median: return "md";
    case AggRule::Kind::trimmed: return "tr";
  }
  return "me";
}

std::vector<double> coord_median(VectorList vectors) {
  return per_coordinate(vectors, [](std::span<const double> col) {
    const std::size_t m = col.size();
    if (m % 2 == 1) return col[m / 2];
    return (col[m / 2 - 1] + col[m / 2]) / 2.0;
  });
}

std::vector<double> coord_trimmed_mean(VectorList vectors, double beta) {
  if (!(beta >= 0.0 && beta < 0.5))
    throw std::invalid_argument("coord_trimmed_mean: beta must lie in [0, 1/2)");
  const std::size_t m = vectors.size();
  const std::size_t k = trim_count(beta, m);
  if (m != 0 && m <= 2 * k)
    throw std::invalid_argument("coord_trimmed_mean: all values trimmed");
  return per_coordinate(vectors, [k](std::span<const double> col) {
    return sorted_mean(col.subspan(k, col.size() - 2 * k));
  });
}

std::vector<double> coord_mean(VectorList vectors) {
  return per_coordinate(vectors,
                        [](std::span<const double> col) { return sorted_mean(col); });
}

std::vector<double> aggregate(const AggRule& rule, VectorList vectors) {
  switch (rule.kind) {
    case AggRule::Kind::mean: return coord_mean(vectors);
    case AggRule::Kind::median: return coord_median(vectors);
    case AggRule::Kind::trimmed: return coord_trimmed_mean(vectors, rule.beta);
  }
  throw std::logic_error("aggregate: unknown rule");
}

}  // namespace bcsl::agg
