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

#include <algorithm>
#include <limits>
#include <random>

#include "bcsl/robust_agg.hpp"
#include "bcsl/serial_reference.hpp"
#include "oracles.hpp"

using namespace bcsl;
using Matrix = std::vector<std::vector<double>>;

namespace {

Matrix random_reports(std::mt19937_64& gen, std::size_t m, std::size_t d, bool ties) {
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> small(-2, 2);
  Matrix vs(m, std::vector<double>(d));
  for (auto& v : vs)
    for (auto& x : v) x = ties ? 0.5 * small(gen) : nd(gen);
  return vs;
}

}  // namespace

TEST_CASE("coord_median examples") {
  CHECK(agg::coord_median(Matrix{{1, 5}, {2, 4}, {3, 3}}) == std::vector<double>{2, 4});
  CHECK(agg::coord_median(Matrix{{1.5, -2}}) == std::vector<double>{1.5, -2});
  CHECK(agg::coord_median(Matrix{{1, 0}, {3, 0}}) == std::vector<double>{2, 0});
}

TEST_CASE("coord_trimmed_mean examples") {
  CHECK(agg::coord_trimmed_mean(Matrix{{0}, {1}, {2}, {3}, {100}}, 0.2) == std::vector<double>{2});
  std::mt19937_64 gen(1);
  for (int i = 0; i < 100; ++i) {
    const auto vs = random_reports(gen, 1 + i % 9, 3, i % 2);
    CHECK(agg::coord_trimmed_mean(vs, 0.0) == agg::coord_mean(vs));
  }
  CHECK(agg::coord_mean(Matrix{{1, 1}, {3, 3}}) == std::vector<double>{2, 2});
  CHECK(agg::coord_mean(Matrix{{0.1, 7}}) == std::vector<double>{0.1, 7});
}

TEST_CASE("aggregation error paths") {
  CHECK_THROWS_WITH(agg::coord_median(Matrix{}), doctest::Contains("empty"));
  CHECK_THROWS_WITH(agg::coord_mean(Matrix{}), doctest::Contains("empty"));
  CHECK_THROWS_WITH(agg::coord_median(Matrix{{1, 2}, {3}}), doctest::Contains("ragged"));
  CHECK_THROWS(agg::coord_trimmed_mean(Matrix{{1}, {2}}, 0.5));
  CHECK_THROWS(agg::coord_trimmed_mean(Matrix{{1}, {2}}, -0.1));
  // floor(0.49 * 2) = 0, nothing is trimmed.
  CHECK(agg::coord_trimmed_mean(Matrix{{1}, {2}}, 0.49) == std::vector<double>{1.5});
  CHECK_THROWS(agg::coord_median(Matrix{{std::numeric_limits<double>::quiet_NaN()}}));
  CHECK_THROWS(agg::AggRule::trimmed(0.5).validate(2));
  CHECK_NOTHROW(agg::AggRule::trimmed(0.2).validate(20));
}

TEST_CASE("robust rules match the sort-based oracle") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> bd(0.0, 0.49);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t m = 1 + i % 9, d = 1 + i % 4;
    const auto vs = random_reports(gen, m, d, i % 3 == 0);
    CHECK(agg::coord_median(vs) == oracle::median(vs));
    const double beta = bd(gen);
    if (m > 2 * agg::trim_count(beta, m)) CHECK(agg::coord_trimmed_mean(vs, beta) == oracle::trimmed(vs, beta));
    CHECK(serial::coord_median(vs) == agg::coord_median(vs));
  }
  // m = 7, beta = 0.25 drops one value per side.
  const auto vs = random_reports(gen, 7, 4, false);
  CHECK(agg::coord_trimmed_mean(vs, 0.25) == oracle::trimmed(vs, 0.25));
}

TEST_CASE("permutation invariance and translation equivariance") {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 300; ++i) {
    const std::size_t m = 2 + i % 12, d = 1 + i % 5;
    auto vs = random_reports(gen, m, d, i % 2);
    const auto med = agg::coord_median(vs), mean = agg::coord_mean(vs),
               tr = agg::coord_trimmed_mean(vs, 0.2);
    std::shuffle(vs.begin(), vs.end(), gen);
    CHECK(agg::coord_median(vs) == med);
    CHECK(agg::coord_mean(vs) == mean);
    CHECK(agg::coord_trimmed_mean(vs, 0.2) == tr);

    const auto c = oracle::random_vector(gen, d);
    auto shifted = vs;
    for (auto& v : shifted)
      for (std::size_t k = 0; k < d; ++k) v[k] += c[k];
    const auto med2 = agg::coord_median(shifted), tr2 = agg::coord_trimmed_mean(shifted, 0.2),
               mean2 = agg::coord_mean(shifted);
    for (std::size_t k = 0; k < d; ++k) {
      CHECK(med2[k] == doctest::Approx(med[k] + c[k]).epsilon(1e-12).scale(1.0));
      CHECK(tr2[k] == doctest::Approx(tr[k] + c[k]).epsilon(1e-12).scale(1.0));
      CHECK(mean2[k] == doctest::Approx(mean[k] + c[k]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("median and trimmed mean stay inside the honest range") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> wild(-1e9, 1e9);
  for (int i = 0; i < 500; ++i) {
    const std::size_t m = 3 + i % 17, d = 3;
    const std::size_t bad = (m - 1) / 2;  // strictly fewer than m / 2
    auto vs = random_reports(gen, m, d, false);
    for (std::size_t j = 0; j < bad; ++j)
      for (auto& x : vs[j]) x = wild(gen);
    const auto med = agg::coord_median(vs);
    const double beta = static_cast<double>(bad) / static_cast<double>(m) + 1e-12;
    const bool trim_ok = beta < 0.5 && m > 2 * agg::trim_count(beta, m);
    const auto tr = trim_ok ? agg::coord_trimmed_mean(vs, beta) : med;
    for (std::size_t k = 0; k < d; ++k) {
      double lo = 1e300, hi = -1e300;
      for (std::size_t j = bad; j < m; ++j) {
        lo = std::min(lo, vs[j][k]);
        hi = std::max(hi, vs[j][k]);
      }
      CHECK(med[k] >= lo);
      CHECK(med[k] <= hi);
      CHECK(tr[k] >= lo);
      CHECK(tr[k] <= hi);
    }
  }
}

TEST_CASE("identical reports give identical aggregates under every rule") {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 200; ++i) {
    const auto v = oracle::random_vector(gen, 5);
    const Matrix vs(1 + i % 20, v);
    CHECK(agg::coord_median(vs) == v);
    CHECK(agg::coord_mean(vs) == v);
    CHECK(agg::coord_trimmed_mean(vs, 0.2) == v);
  }
}

TEST_CASE("rule parsing") {
  CHECK(agg::parse_rule("md") == agg::AggRule::Kind::median);
  CHECK(agg::parse_rule("trimmed") == agg::AggRule::Kind::trimmed);
  CHECK(agg::short_name(agg::AggRule::Kind::mean) == "me");
  CHECK_THROWS(agg::parse_rule("krum"));
}
