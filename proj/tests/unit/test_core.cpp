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
#include <random>

#include "bcsl/core.hpp"
#include "bcsl/rng.hpp"
#include "oracles.hpp"

using namespace bcsl;

TEST_CASE("l2_norm examples") {
  CHECK(l2_norm(std::vector<double>{3, 4}) == 5.0);
  CHECK(l2_norm(std::vector<double>(7, 0.0)) == 0.0);
  CHECK(l2_norm(std::vector<double>{1, 1, 1, 1}) == 2.0);
}

TEST_CASE("l2_norm rejects non-finite input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(l2_norm(std::vector<double>{1, nan}), doctest::Contains("non-finite input"),
                       std::invalid_argument);
  CHECK_THROWS(l2_norm(std::vector<double>{inf}));
}

TEST_CASE("l2_norm does not overflow on large entries") {
  CHECK(l2_norm(std::vector<double>{3e200, 4e200}) == doctest::Approx(5e200));
}

TEST_CASE("l2_norm homogeneity and triangle inequality") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> cd(-50.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto u = oracle::random_vector(gen, 1 + trial % 13, 3.0);
    const auto v = oracle::random_vector(gen, u.size(), 3.0);
    const double c = cd(gen);
    std::vector<double> cu(u), s(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      cu[i] *= c;
      s[i] += v[i];
    }
    CHECK(l2_norm(cu) == doctest::Approx(std::abs(c) * l2_norm(u)).epsilon(1e-12));
    CHECK(l2_norm(s) <= l2_norm(u) + l2_norm(v) + 1e-12);
  }
}

TEST_CASE("ParamVec validates entries") {
  CHECK_THROWS(ParamVec({1.0, std::numeric_limits<double>::quiet_NaN()}));
  const ParamVec p{1.0, 2.0};
  CHECK(p.size() == 2);
  CHECK(p[1] == 2.0);
  CHECK(ParamVec(3).norm() == 0.0);
}

TEST_CASE("Dataset validation") {
  CHECK_THROWS(Dataset(2, 1, {1.0, 2.0}, {0.0, 0.5}, LabelKind::binary));
  CHECK_THROWS(Dataset(2, 1, {1.0, std::nan("")}, {0.0, 1.0}, LabelKind::binary));
  CHECK_THROWS(Dataset(2, 2, {1.0, 2.0}, {0.0, 1.0}, LabelKind::binary));
  Dataset d(3, 2, {1, 2, 3, 4, 5, 6}, {0, 1, 0}, LabelKind::binary);
  CHECK(d.row(1)[0] == 3.0);
  const std::vector<std::size_t> idx{2, 0};
  const auto s = d.subset(idx);
  CHECK(s.rows() == 2);
  CHECK(s.row(0)[1] == 6.0);
  CHECK(s.label(1) == 0.0);
}

TEST_CASE("ShardAssignment invariants") {
  using V = std::vector<std::vector<std::size_t>>;
  CHECK_THROWS(ShardAssignment(V{{0, 1}}, 2));                 // fewer than 2 shards
  CHECK_THROWS(ShardAssignment(V{{0, 1}, {2}}, 3));            // unequal sizes
  CHECK_THROWS(ShardAssignment(V{{0, 1}, {1, 2}}, 3));         // overlap
  CHECK_THROWS(ShardAssignment(V{{0, 1}, {2, 9}}, 4));         // out of range
  ShardAssignment s(V{{0, 1}, {2, 3}, {4, 5}}, 6);
  CHECK(s.num_workers() == 2);
  CHECK(s.num_machines() == 3);
  CHECK(s.master()[0] == 0);
  CHECK(s.shard(3)[1] == 5);
  CHECK_THROWS(s.shard(0));
  CHECK_THROWS(s.shard(4));
  CHECK(s.allocated() == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("ByzantineMask invariants") {
  CHECK_THROWS(ByzantineMask(10, 0.5, {}));
  CHECK_THROWS(ByzantineMask(10, 0.2, {2}));           // |B| != floor(alpha m)
  CHECK_THROWS(ByzantineMask(10, 0.2, {1, 2}));        // master
  CHECK_THROWS(ByzantineMask(10, 0.2, {2, 2}));        // duplicate
  CHECK_THROWS(ByzantineMask(10, 0.2, {2, 12}));       // outside 2..m+1
  const ByzantineMask b(10, 0.2, {11, 3});
  CHECK(b.is_byzantine(3));
  CHECK(b.is_byzantine(11));
  CHECK_FALSE(b.is_byzantine(1));
  CHECK(ByzantineMask::none(5).corrupted().empty());
  // 0.29 * 100 is 28.999999999999996 in binary; the guard still counts 29.
  CHECK(floor_fraction(0.29, 100) == 29);
}

TEST_CASE("random mask draws floor(alpha m) distinct workers, never the master") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto m = static_cast<std::size_t>(2 + seed % 40);
    const auto b = ByzantineMask::random(m, 0.3, seed);
    CHECK(b.corrupted().size() == floor_fraction(0.3, m));
    for (auto id : b.corrupted()) {
      CHECK(id >= 2);
      CHECK(id <= static_cast<MachineId>(m + 1));
    }
  }
  CHECK(ByzantineMask::random(20, 0.2, 5).corrupted() ==
        ByzantineMask::random(20, 0.2, 5).corrupted());
}

TEST_CASE("Rng is reproducible and well-behaved") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(1);
  double mean = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    mean += z;
    sq += z * z;
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
}
