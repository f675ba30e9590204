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

// Straight-line single-threaded versions of the parallel kernels. They are
// kept for cross-checking in tests and as the benchmark baseline.

#ifndef BCSL_SERIAL_REFERENCE_HPP
#define BCSL_SERIAL_REFERENCE_HPP

#include <span>
#include <vector>

#include "bcsl/core.hpp"
#include "bcsl/glm.hpp"

namespace bcsl::serial {

double loss_value(const glm::GlmModel& model, std::span<const double> theta,
                  const Dataset& data, Shard shard);

std::vector<double> gradient(const glm::GlmModel& model,
                             std::span<const double> theta, const Dataset& data,
                             Shard shard);

std::vector<double> coord_median(std::span<const std::vector<double>> vectors);
std::vector<double> coord_trimmed_mean(std::span<const std::vector<double>> vectors,
                                       double beta);

}  // namespace bcsl::serial

#endif  // BCSL_SERIAL_REFERENCE_HPP
