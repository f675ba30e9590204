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

#ifndef BCSL_PROTOCOL_HPP
#define BCSL_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcsl/adversary.hpp"
#include "bcsl/core.hpp"
#include "bcsl/glm.hpp"
#include "bcsl/local_solver.hpp"
#include "bcsl/robust_agg.hpp"

namespace bcsl::protocol {

enum class Algorithm { bcsl, bcslp };
enum class InitKind { zero, local };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);
InitKind parse_init(std::string_view name);
std::string_view to_string(InitKind i);

struct AlgoSpec {
  Algorithm algorithm = Algorithm::bcsl;
  agg::AggRule rule = agg::AggRule::median();
  double lambda = 0.0;  // must be 0 for bcsl and > 0 for bcslp
  int T = 10;
  InitKind init = InitKind::zero;

  void validate(std::size_t num_workers) const;
  // "BCSL-md", "BCSLp-tr", ...
  std::string label() const;
};

/// Everything a run needs besides the algorithm: model, data layout,
/// adversary and the reference points used for metrics.
struct Environment {
  glm::GlmModel model;
  glm::Penalty penalty;
  const Dataset* data = nullptr;
  const ShardAssignment* shards = nullptr;
  ByzantineMask mask;
  adversary::AttackSpec attack = adversary::AttackSpec::sign_flip(3.0);
  std::uint64_t seed = 0;
  solver::SolverOptions solver;
  std::optional<ParamVec> theta_star;
  std::optional<ParamVec> theta_hat;
  const Dataset* test_set = nullptr;
  double sentinel = adversary::kDefaultSentinel;
  bool timing = false;
};

struct RoundRecord {
  int t = 0;
  ParamVec theta;
  std::optional<double> err_star;
  std::optional<double> err_hat;
  std::optional<double> test_error;
  int inner_iters = 0;
  std::optional<double> elapsed_ms;
  bool inner_converged = true;
  bool non_unique = false;
};

struct IterationTrace {
  std::vector<RoundRecord> rounds;  // t = 0..T (fewer when aborted)
  bool aborted = false;
  std::string error;
  bool non_unique_flagged = false;
  std::vector<std::string> warnings;
  // One round = one broadcast of theta_t plus m gradient reports.
  std::size_t communication_rounds = 0;
};

struct RoundOutput {
  ParamVec next;
  std::vector<GradientReport> reports;  // worker-id order
  std::vector<double> aggregate;        // h(theta_t)
  solver::SolveDiagnostics diagnostics;
};

/// Worker reports at theta_t for round t: honest workers send their shard
/// gradient, Byzantine workers a corrupted vector, and the master clamps
/// non-finite entries. Ordered by worker id.
std::vector<GradientReport> collect_reports(const Environment& env,
                                            const ParamVec& theta, int t);

/// theta_{t+1} = argmin f_1(theta) - <grad f_1(theta_t) - h(theta_t), theta>
///              + g(theta) + (lambda/2)||theta - theta_t||^2
RoundOutput one_round(const AlgoSpec& algo, const Environment& env,
                      const ParamVec& theta_t, int t);

// Zero vector, or the master's own minimizer of f_1 + g (+ ridge lambda).
ParamVec initial_point(const AlgoSpec& algo, const Environment& env,
                       solver::SolveDiagnostics* diagnostics = nullptr);

IterationTrace run(const AlgoSpec& algo, const Environment& env);

}  // namespace bcsl::protocol

#endif  // BCSL_PROTOCOL_HPP
