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

// Parallel kernels against their serial references.
//   bcsl_bench --benchmark_filter=Gradient

#include <benchmark/benchmark.h>

#include <vector>

#include "bcsl/data_io.hpp"
#include "bcsl/glm.hpp"
#include "bcsl/rng.hpp"
#include "bcsl/robust_agg.hpp"
#include "bcsl/serial_reference.hpp"

using namespace bcsl;

namespace {

const data::Generated& fixture(std::size_t rows) {
  static std::vector<std::pair<std::size_t, data::Generated>> cache;
  for (const auto& [r, g] : cache)
    if (r == rows) return g;
  cache.emplace_back(rows, data::gen_logistic_dense(rows, 100, 1));
  return cache.back().second;
}

std::vector<std::vector<double>> reports(std::size_t m, std::size_t d) {
  Rng rng(2);
  std::vector<std::vector<double>> out(m, std::vector<double>(d));
  for (auto& v : out)
    for (auto& x : v) x = rng.normal();
  return out;
}

const glm::GlmModel kModel{glm::Family::logistic, true};

void BM_GradientParallel(benchmark::State& state) {
  const auto& g = fixture(static_cast<std::size_t>(state.range(0)));
  const auto rows = g.data.all_indices();
  for (auto _ : state) benchmark::DoNotOptimize(glm::gradient(kModel, g.theta_star, g.data, rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientSerial(benchmark::State& state) {
  const auto& g = fixture(static_cast<std::size_t>(state.range(0)));
  const auto rows = g.data.all_indices();
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::gradient(kModel, g.theta_star, g.data, rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LossParallel(benchmark::State& state) {
  const auto& g = fixture(static_cast<std::size_t>(state.range(0)));
  const auto rows = g.data.all_indices();
  for (auto _ : state)
    benchmark::DoNotOptimize(glm::loss_value(kModel, g.theta_star, g.data, rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LossSerial(benchmark::State& state) {
  const auto& g = fixture(static_cast<std::size_t>(state.range(0)));
  const auto rows = g.data.all_indices();
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::loss_value(kModel, g.theta_star, g.data, rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MedianParallel(benchmark::State& state) {
  const auto r = reports(static_cast<std::size_t>(state.range(0)), 1001);
  for (auto _ : state) benchmark::DoNotOptimize(agg::coord_median(r));
}

void BM_MedianSerial(benchmark::State& state) {
  const auto r = reports(static_cast<std::size_t>(state.range(0)), 1001);
  for (auto _ : state) benchmark::DoNotOptimize(serial::coord_median(r));
}

void BM_TrimmedParallel(benchmark::State& state) {
  const auto r = reports(static_cast<std::size_t>(state.range(0)), 1001);
  for (auto _ : state) benchmark::DoNotOptimize(agg::coord_trimmed_mean(r, 0.2));
}

void BM_TrimmedSerial(benchmark::State& state) {
  const auto r = reports(static_cast<std::size_t>(state.range(0)), 1001);
  for (auto _ : state) benchmark::DoNotOptimize(serial::coord_trimmed_mean(r, 0.2));
}

}  // namespace

BENCHMARK(BM_GradientParallel)->Arg(900)->Arg(18000);
BENCHMARK(BM_GradientSerial)->Arg(900)->Arg(18000);
BENCHMARK(BM_LossParallel)->Arg(900)->Arg(18000);
BENCHMARK(BM_LossSerial)->Arg(900)->Arg(18000);
BENCHMARK(BM_MedianParallel)->Arg(20)->Arg(40);
BENCHMARK(BM_MedianSerial)->Arg(20)->Arg(40);
BENCHMARK(BM_TrimmedParallel)->Arg(20)->Arg(40);
BENCHMARK(BM_TrimmedSerial)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
