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

#include "bcsl/adversary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bcsl::adversary {

AttackSpec AttackSpec::gaussian(double sigma) { return {Kind::gaussian, sigma}; }
AttackSpec AttackSpec::sign_flip(double scale) { return {Kind::sign_flip, scale}; }
AttackSpec AttackSpec::constant(double c) { return {Kind::constant, c}; }
AttackSpec AttackSpec::collusion_mean_reverse(double scale) {
  return {Kind::collusion_mean_reverse, scale};
}

void AttackSpec::validate() const {
  if (!std::isfinite(param)) throw std::invalid_argument("attack parameter must be finite");
  if (kind == Kind::gaussian && param < 0.0)
    throw std::invalid_argument("gaussian attack needs sigma >= 0");
}

AttackSpec::Kind parse_attack(std::string_view name) {
  if (name == "gaussian") return AttackSpec::Kind::gaussian;
  if (name == "sign_flip") return AttackSpec::Kind::sign_flip;
  if (name == "constant") return AttackSpec::Kind::constant;
  if (name == "collusion_mean_reverse") return AttackSpec::Kind::collusion_mean_reverse;
  throw std::invalid_argument("unknown attack: " + std::string(name));
}

std::string_view to_string(AttackSpec::Kind kind) {
  switch (kind) {
    case AttackSpec::Kind::gaussian: return "gaussian";
    case AttackSpec::Kind::sign_flip: return "sign_flip";
    case AttackSpec::Kind::constant: return "constant";
    case AttackSpec::Kind::collusion_mean_reverse: return "collusion_mean_reverse";
  }
  return "sign_flip";
}

std::vector<double> corrupt(const AttackSpec& attack,
                            std::span<const double> honest_gradient,
                            std::span<const double> honest_mean, Rng& rng) {
  const std::size_t d = honest_gradient.size();
  std::vector<double> out(d);
  switch (attack.kind) {
    case AttackSpec::Kind::gaussian:
      for (std::size_t j = 0; j < d; ++j)
        out[j] = honest_gradient[j] + attack.param * rng.normal();
      break;
    case AttackSpec::Kind::sign_flip:
      for (std::size_t j = 0; j < d; ++j) out[j] = -attack.param * honest_gradient[j];
      break;
    case AttackSpec::Kind::constant:
      std::fill(out.begin(), out.end(), attack.param);
      break;
    case AttackSpec::Kind::collusion_mean_reverse:
      if (honest_mean.size() != d)
        throw std::invalid_argument("collusion attack: honest mean has wrong length");
      for (std::size_t j = 0; j < d; ++j) out[j] = -attack.param * honest_mean[j];
      break;
  }
  return out;
}

std::size_t sanitize_report(std::span<double> report, double sentinel) {
  std::size_t changed = 0;
  for (auto& x : report) {
    if (std::isnan(x)) {
      x = sentinel;
      ++changed;
    } else if (x > sentinel) {
      x = sentinel;
      ++changed;
    } else if (x < -sentinel) {
      x = -sentinel;
      ++changed;
    }
  }
  return changed;
}

}  // namespace bcsl::adversary
