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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "bcsl/adversary.hpp"
#include "bcsl/rng.hpp"

using namespace bcsl;
using adversary::AttackSpec;

TEST_CASE("corrupt examples") {
  Rng rng(1);
  const std::vector<double> g{1, -2}, mean{0.5, 0.5};
  CHECK(adversary::corrupt(AttackSpec::sign_flip(1.0), g, mean, rng) == std::vector<double>{-1, 2});
  CHECK(adversary::corrupt(AttackSpec::constant(0.0), g, mean, rng) == std::vector<double>{0, 0});
  CHECK(adversary::corrupt(AttackSpec::gaussian(0.0), g, mean, rng) == g);
  CHECK(adversary::corrupt(AttackSpec::collusion_mean_reverse(2.0), g, mean, rng) ==
        std::vector<double>{-1, -1});
  CHECK(adversary::corrupt(AttackSpec::sign_flip(3.0), g, mean, rng) == std::vector<double>{-3, 6});
}

TEST_CASE("corrupt is deterministic in the stream seed") {
  const std::vector<double> g(50, 1.0), mean(50, 0.0);
  Rng a(99), b(99), c(100);
  const auto x = adversary::corrupt(AttackSpec::gaussian(2.0), g, mean, a);
  CHECK(x == adversary::corrupt(AttackSpec::gaussian(2.0), g, mean, b));
  CHECK(x != adversary::corrupt(AttackSpec::gaussian(2.0), g, mean, c));
  for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("attack validation") {
  CHECK_THROWS(AttackSpec::gaussian(-1.0).validate());
  CHECK_THROWS(AttackSpec::constant(std::numeric_limits<double>::infinity()).validate());
  CHECK(adversary::parse_attack("collusion_mean_reverse") ==
        AttackSpec::Kind::collusion_mean_reverse);
  CHECK_THROWS(adversary::parse_attack("poison"));
}

TEST_CASE("sanitize_report clamps non-finite and huge entries") {
  std::vector<double> r{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::infinity(),
                        -std::numeric_limits<double>::infinity(), 5e13, 3.0};
  CHECK(adversary::sanitize_report(r) == 4);
  CHECK(r == std::vector<double>{1e12, 1e12, -1e12, 1e12, 3.0});
}
