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

#ifndef BCSL_ADVERSARY_HPP
#define BCSL_ADVERSARY_HPP

#include <span>
#include <string_view>
#include <vector>

#include "bcsl/rng.hpp"

namespace bcsl::adversary {

inline constexpr double kDefaultSentinel = 1e12;

/// What a Byzantine worker sends in place of its gradient.
///   gaussian(sigma)               g + N(0, sigma^2 I)
///   sign_flip(scale)              -scale * g
///   constant(c)                   (c, ..., c)
///   collusion_mean_reverse(scale) -scale * mean of honest reports, same
///                                 vector from every Byzantine worker
struct AttackSpec {
  enum class Kind { gaussian, sign_flip, constant, collusion_mean_reverse };
  Kind kind = Kind::sign_flip;
  double param = 3.0;

  static AttackSpec gaussian(double sigma);
  static AttackSpec sign_flip(double scale);
  static AttackSpec constant(double c);
  static AttackSpec collusion_mean_reverse(double scale);

  void validate() const;
};

AttackSpec::Kind parse_attack(std::string_view name);
std::string_view to_string(AttackSpec::Kind kind);

std::vector<double> corrupt(const AttackSpec& attack,
                            std::span<const double> honest_gradient,
                            std::span<const double> honest_mean, Rng& rng);

// Master-side report validation: NaN -> +sentinel, values beyond +-sentinel
// (including infinities) are clamped. Returns the number of entries changed.
std::size_t sanitize_report(std::span<double> report,
                            double sentinel = kDefaultSentinel);

}  // namespace bcsl::adversary

#endif  // BCSL_ADVERSARY_HPP
