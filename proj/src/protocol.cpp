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

#include "bcsl/protocol.hpp"

#include <chrono>
#include <stdexcept>

#include "bcsl/rng.hpp"

namespace bcsl::protocol {

namespace {

void check_env(const Environment& env) {
  if (env.data == nullptr || env.shards == nullptr)
    throw std::invalid_argument("protocol: environment has no data or shards");
  if (env.mask.num_workers() != env.shards->num_workers())
    throw std::invalid_argument("protocol: mask and shard assignment disagree on m");
}

RoundRecord record_for(const Environment& env, int t, ParamVec theta) {
  RoundRecord rec;
  rec.t = t;
  if (env.theta_star) rec.err_star = l2_distance(theta, *env.theta_star);
  if (env.theta_hat) rec.err_hat = l2_distance(theta, *env.theta_hat);
  if (env.test_set != nullptr && env.test_set->kind() == LabelKind::binary &&
      env.test_set->rows() > 0) {
    const auto idx = env.test_set->all_indices();
    rec.test_error = glm::classification_error(theta, *env.test_set, idx);
  }
  rec.theta = std::move(theta);
  return rec;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "bcsl") return Algorithm::bcsl;
  if (name == "bcslp") return Algorithm::bcslp;
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

std::string_view to_string(Algorithm a) { return a == Algorithm::bcsl ? "bcsl" : "bcslp"; }

InitKind parse_init(std::string_view name) {
  if (name == "zero") return InitKind::zero;
  if (name == "local") return InitKind::local;
  throw std::invalid_argument("unknown init: " + std::string(name));
}

std::string_view to_string(InitKind i) { return i == InitKind::zero ? "zero" : "local"; }

void AlgoSpec::validate(std::size_t num_workers) const {
  if (T < 0) throw std::invalid_argument("AlgoSpec: T must be >= 0");
  if (algorithm == Algorithm::bcsl && lambda != 0.0)
    throw std::invalid_argument("AlgoSpec: bcsl requires lambda = 0");
  if (algorithm == Algorithm::bcslp && !(lambda > 0.0))
    throw std::invalid_argument("AlgoSpec: bcslp requires lambda > 0");
  rule.validate(num_workers);
}

std::string AlgoSpec::label() const {
  std::string s = algorithm == Algorithm::bcsl ? "BCSL-" : "BCSLp-";
  s += agg::short_name(rule.kind);
  return s;
}

std::vector<GradientReport> collect_reports(const Environment& env,
                                            const ParamVec& theta, int t) {
  check_env(env);
  const std::size_t m = env.shards->num_workers();
  std::vector<GradientReport> reports(m);

  // Every worker's true gradient first; the collusion attack needs the mean
  // over honest workers before any Byzantine report exists.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(m); ++k) {
    const auto id = static_cast<MachineId>(k + 2);
    auto& r = reports[static_cast<std::size_t>(k)];
    r.worker_id = id;
    r.honest = !env.mask.is_byzantine(id);
    r.vector = glm::gradient(env.model, theta, *env.data, env.shards->shard(id)).vec();
  }

  std::vector<double> honest_mean;
  if (env.attack.kind == adversary::AttackSpec::Kind::collusion_mean_reverse) {
    honest_mean.assign(theta.size(), 0.0);
    std::size_t count = 0;
    for (const auto& r : reports) {
      if (!r.honest) continue;
      for (std::size_t j = 0; j < honest_mean.size(); ++j) honest_mean[j] += r.vector[j];
      ++count;
    }
    if (count > 0)
      for (auto& v : honest_mean) v /= static_cast<double>(count);
  }

  for (auto& r : reports) {
    if (r.honest) continue;
    Rng rng(derive_seed(env.seed, {stream::kAttack, static_cast<std::uint64_t>(r.worker_id),
                                   static_cast<std::uint64_t>(t)}));
    r.vector = adversary::corrupt(env.attack, r.vector, honest_mean, rng);
  }
  for (auto& r : reports) adversary::sanitize_report(r.vector, env.sentinel);
  return reports;
}

RoundOutput one_round(const AlgoSpec& algo, const Environment& env,
                      const ParamVec& theta_t, int t) {
  check_env(env);
  RoundOutput out;
  out.reports = collect_reports(env, theta_t, t);

  std::vector<std::vector<double>> vectors;
  vectors.reserve(out.reports.size());
  for (const auto& r : out.reports) vectors.push_back(r.vector);
  out.aggregate = agg::aggregate(algo.rule, vectors);

  const Shard master = env.shards->master();
  const ParamVec grad1 = glm::gradient(env.model, theta_t, *env.data, master);
  std::vector<double> shift(theta_t.size());
  for (std::size_t j = 0; j < shift.size(); ++j) shift[j] = grad1[j] - out.aggregate[j];

  solver::SurrogateProblem problem{env.model,
                                   env.data,
                                   master,
                                   std::move(shift),
                                   env.penalty,
                                   algo.algorithm == Algorithm::bcslp ? algo.lambda : 0.0,
                                   theta_t,
                                   std::nullopt};
  auto solved = solver::solve_surrogate(problem, theta_t, env.solver);
  out.next = std::move(solved.theta);
  out.diagnostics = std::move(solved.diagnostics);
  return out;
}

ParamVec initial_point(const AlgoSpec& algo, const Environment& env,
                       solver::SolveDiagnostics* diagnostics) {
  check_env(env);
  const std::size_t d = env.data->cols();
  if (algo.init == InitKind::zero) return ParamVec(d);
  const double ridge = algo.algorithm == Algorithm::bcslp ? algo.lambda : 0.0;
  auto solved = solver::shard_minimizer(env.model, env.penalty, *env.data,
                                        env.shards->master(), ridge, env.solver);
  if (diagnostics) *diagnostics = solved.diagnostics;
  return solved.theta;
}

IterationTrace run(const AlgoSpec& algo, const Environment& env) {
  check_env(env);
  algo.validate(env.shards->num_workers());
  IterationTrace trace;
  if (algo.rule.kind == agg::AggRule::Kind::trimmed && env.mask.alpha() > algo.rule.beta)
    trace.warnings.push_back("Byzantine fraction exceeds the trim fraction beta");

  auto start = Clock::now();
  solver::SolveDiagnostics init_diag;
  ParamVec theta;
  try {
    theta = initial_point(algo, env, &init_diag);
  } catch (const DivergenceError& e) {
    trace.aborted = true;
    trace.error = e.what();
    return trace;
  }
  {
    RoundRecord rec = record_for(env, 0, theta);
    rec.inner_iters = init_diag.iterations;
    rec.inner_converged = algo.init == InitKind::zero || init_diag.converged;
    if (env.timing) rec.elapsed_ms = ms_since(start);
    trace.rounds.push_back(std::move(rec));
  }

  for (int t = 0; t < algo.T; ++t) {
    start = Clock::now();
    RoundOutput out;
    try {
      out = one_round(algo, env, theta, t);
    } catch (const DivergenceError& e) {
      trace.aborted = true;
      trace.error = "round " + std::to_string(t) + ": " + e.what();
      break;
    }
    ++trace.communication_rounds;
    theta = std::move(out.next);
    RoundRecord rec = record_for(env, t + 1, theta);
    rec.inner_iters = out.diagnostics.iterations;
    rec.inner_converged = out.diagnostics.converged;
    rec.non_unique = out.diagnostics.non_unique;
    if (rec.non_unique) trace.non_unique_flagged = true;
    if (env.timing) rec.elapsed_ms = ms_since(start);
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace bcsl::protocol
