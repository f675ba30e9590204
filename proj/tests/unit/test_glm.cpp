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
#include <random>

#include "bcsl/glm.hpp"
#include "bcsl/serial_reference.hpp"
#include "oracles.hpp"

using namespace bcsl;
using glm::Family;

namespace {

Dataset one_point(std::vector<double> x, double y, LabelKind kind) {
  const std::size_t d = x.size();
  return Dataset(1, d, std::move(x), {y}, kind);
}

}  // namespace

TEST_CASE("loss_value examples") {
  std::mt19937_64 gen(3);
  const auto data = oracle::random_dataset(gen, 50, 4, Family::logistic);
  const auto all = data.all_indices();
  CHECK(glm::loss_value({Family::logistic, true}, std::vector<double>(4, 0.0), data, all) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const auto pt = one_point({1.0}, 1.0, LabelKind::binary);
  const std::vector<std::size_t> s0{0};
  CHECK(glm::loss_value({Family::logistic, false}, std::vector<double>{2.0}, pt, s0) ==
        doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-14));

  // Noiseless linear data at theta* has zero loss.
  const std::vector<double> th{1.0, -2.0};
  std::vector<double> x{1, 0.5, 1, -1, 1, 3}, y{0, 3, -5};
  const Dataset lin(3, 2, x, y, LabelKind::continuous);
  const std::vector<std::size_t> s3{0, 1, 2};
  CHECK(glm::loss_value({Family::linear, true}, th, lin, s3) == doctest::Approx(0.0));
}

TEST_CASE("loss and gradient error paths") {
  std::mt19937_64 gen(3);
  const auto data = oracle::random_dataset(gen, 10, 3, Family::logistic);
  const std::vector<std::size_t> empty;
  const std::vector<std::size_t> s{0, 1};
  CHECK_THROWS_WITH(glm::loss_value({}, std::vector<double>(3, 0.0), data, empty),
                    doctest::Contains("empty shard"));
  CHECK_THROWS(glm::gradient({}, std::vector<double>(2, 0.0), data, s));
}

TEST_CASE("logistic loss is stable for large margins") {
  const auto pt = one_point({1.0}, 0.0, LabelKind::binary);
  const std::vector<std::size_t> s0{0};
  CHECK(glm::loss_value({Family::logistic, false}, std::vector<double>{800.0}, pt, s0) ==
        doctest::Approx(800.0));
  CHECK(std::isfinite(glm::loss_value({Family::logistic, false}, std::vector<double>{-800.0}, pt, s0)));
  CHECK(glm::sigmoid(-800.0) >= 0.0);
  CHECK(glm::sigmoid(800.0) == 1.0);
}

TEST_CASE("gradient examples") {
  const auto pt = one_point({1.0, 1.0}, 1.0, LabelKind::binary);
  const std::vector<std::size_t> s0{0};
  const auto g = glm::gradient({Family::logistic, true}, std::vector<double>{0.0, 0.0}, pt, s0);
  CHECK(g[0] == -0.5);
  CHECK(g[1] == -0.5);

  // Linear: gradient = Sigma theta - v from the shard moments.
  std::mt19937_64 gen(11);
  const auto data = oracle::random_dataset(gen, 40, 5, Family::linear);
  const std::vector<std::size_t> shard{0, 3, 5, 8, 13, 21, 34};
  const auto th = oracle::random_vector(gen, 5);
  const auto mom = glm::shard_moments(data, shard);
  const auto gl = glm::gradient({Family::linear, true}, th, data, shard);
  for (std::size_t i = 0; i < 5; ++i) {
    double e = -mom.v[i];
    for (std::size_t j = 0; j < 5; ++j) e += mom.sigma[i * 5 + j] * th[j];
    CHECK(gl[i] == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Family fam = trial % 2 ? Family::linear : Family::logistic;
    const auto data = oracle::random_dataset(gen, 20, 5, fam);
    const auto th = oracle::random_vector(gen, 5);
    const auto all = data.all_indices();
    const auto g = glm::gradient({fam, true}, th, data, all);
    const auto fd = oracle::fd_gradient(
        [&](std::span<const double> t) { return oracle::naive_shard_loss(fam, data, all, t); },
        th, 1e-6);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(std::abs(g[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
  }
}

TEST_CASE("loss is convex along random segments") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Family fam = trial % 2 ? Family::linear : Family::logistic;
    const auto data = oracle::random_dataset(gen, 30, 4, fam);
    const auto a = oracle::random_vector(gen, 4, 2.0);
    const auto b = oracle::random_vector(gen, 4, 2.0);
    std::vector<double> mid(4);
    for (int i = 0; i < 4; ++i) mid[i] = 0.5 * (a[i] + b[i]);
    const auto all = data.all_indices();
    const glm::GlmModel model{fam, true};
    CHECK(glm::loss_value(model, mid, data, all) <=
          0.5 * (glm::loss_value(model, a, data, all) + glm::loss_value(model, b, data, all)) +
              1e-12);
  }
}

TEST_CASE("penalty_value examples") {
  CHECK(glm::penalty_value(glm::Penalty::none(), std::vector<double>{5, 5}) == 0.0);
  CHECK(glm::penalty_value(glm::Penalty::l1(2.0), std::vector<double>{1, -3}) == 8.0);
  CHECK(glm::penalty_value(glm::Penalty::l2sq(1.0), std::vector<double>{3, 4}) == 12.5);
  CHECK_THROWS(glm::Penalty::l1(-1.0));
}

TEST_CASE("prox_penalty examples") {
  const auto p = glm::prox_penalty(glm::Penalty::l1(1.0), std::vector<double>{3, -0.5}, 1.0);
  CHECK(p[0] == 2.0);
  CHECK(p[1] == 0.0);
  const std::vector<double> v{1.5, -2.0, 0.0};
  CHECK(glm::prox_penalty(glm::Penalty::none(), v, 0.37).vec() == v);
  const auto r = glm::prox_penalty(glm::Penalty::l2sq(2.0), v, 0.5);
  CHECK(r[0] == doctest::Approx(0.75));
  CHECK_THROWS(glm::prox_penalty(glm::Penalty::l1(1.0), v, 0.0));

  const double grid = oracle::grid_prox_1d([](double x) { return 0.7 * std::abs(x); }, 0.5, 0.3,
                                           -2.0, 2.0, 1e-4);
  const auto q = glm::prox_penalty(glm::Penalty::l1(0.7), std::vector<double>{0.5}, 0.3);
  CHECK(std::abs(q[0] - grid) <= 5e-4);
}

TEST_CASE("prox is firmly non-expansive and 1-Lipschitz") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ud(0.01, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double gamma = ud(gen), step = ud(gen);
    const glm::Penalty pen = trial % 3 == 0   ? glm::Penalty::l1(gamma)
                             : trial % 3 == 1 ? glm::Penalty::l2sq(gamma)
                                              : glm::Penalty::none();
    const auto u = oracle::random_vector(gen, 6, 2.0);
    const auto v = oracle::random_vector(gen, 6, 2.0);
    const auto pu = glm::prox_penalty(pen, u, step);
    const auto pv = glm::prox_penalty(pen, v, step);
    double lhs = 0.0, inner = 0.0, duv = 0.0;
    for (int i = 0; i < 6; ++i) {
      lhs += (pu[i] - pv[i]) * (pu[i] - pv[i]);
      inner += (u[i] - v[i]) * (pu[i] - pv[i]);
      duv += (u[i] - v[i]) * (u[i] - v[i]);
    }
    CHECK(lhs <= inner + 1e-12);
    CHECK(lhs <= duv + 1e-12);
  }
}

TEST_CASE("parallel kernels agree with the serial reference") {
  std::mt19937_64 gen(17);
  for (std::size_t n : {1u, 255u, 256u, 257u, 3000u}) {
    for (Family fam : {Family::logistic, Family::linear}) {
      const auto data = oracle::random_dataset(gen, n, 7, fam);
      const auto th = oracle::random_vector(gen, 7);
      const auto all = data.all_indices();
      const glm::GlmModel model{fam, true};
      CHECK(glm::loss_value(model, th, data, all) ==
            doctest::Approx(serial::loss_value(model, th, data, all)).epsilon(1e-12));
      const auto g = glm::gradient(model, th, data, all);
      const auto s = serial::gradient(model, th, data, all);
      for (std::size_t i = 0; i < 7; ++i)
        CHECK(g[i] == doctest::Approx(s[i]).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("classification error") {
  Dataset d(4, 1, {1, -1, 2, -2}, {1, 0, 0, 0}, LabelKind::binary);
  const auto all = d.all_indices();
  CHECK(glm::classification_error(std::vector<double>{1.0}, d, all) == 0.25);
}
