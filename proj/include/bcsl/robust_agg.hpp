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

#ifndef BCSL_ROBUST_AGG_HPP
#define BCSL_ROBUST_AGG_HPP

#include <span>
#include <string_view>
#include <vector>

namespace bcsl::agg {

/// Coordinate-wise aggregation rule over m worker vectors.
struct AggRule {
  enum class Kind { mean, median, trimmed };
  Kind kind = Kind::median;
  double beta = 0.0;  // trim fraction per side, trimmed only

  static AggRule mean() { return {Kind::mean, 0.0}; }
  static AggRule median() { return {Kind::median, 0.0}; }
  static AggRule trimmed(double beta) { return {Kind::trimmed, beta}; }

  // Throws unless the rule is usable with m inputs.
  void validate(std::size_t m) const;
};

AggRule::Kind parse_rule(std::string_view name);
std::string_view to_string(AggRule::Kind kind);
// "md", "tr", "me" as in the BCSL-md / BCSL-tr / BCSL-me variant names.
std::string_view short_name(AggRule::Kind kind);

// Number of values dropped from each side: floor(beta m).
std::size_t trim_count(double beta, std::size_t m);

using VectorList = std::span<const std::vector<double>>;

/// Per coordinate: middle order statistic; for even m the midpoint of the
/// two central values.
std::vector<double> coord_median(VectorList vectors);

/// Per coordinate: sort, drop k = floor(beta m) values from each end and
/// average the remaining m - 2k. Kept values are summed in ascending order.
std::vector<double> coord_trimmed_mean(VectorList vectors, double beta);

/// Arithmetic mean; summed in ascending order like the trimmed mean so that
/// coord_mean == coord_trimmed_mean(beta = 0) exactly.
std::vector<double> coord_mean(VectorList vectors);

std::vector<double> aggregate(const AggRule& rule, VectorList vectors);

}  // namespace bcsl::agg

#endif  // BCSL_ROBUST_AGG_HPP
