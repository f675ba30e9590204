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

// Replicated experiment harness: JSON run configurations, the metrics CSV
// and the summary JSON.

#ifndef BCSL_EXPERIMENTS_HPP
#define BCSL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcsl/adversary.hpp"
#include "bcsl/data_io.hpp"
#include "bcsl/glm.hpp"
#include "bcsl/local_solver.hpp"
#include "bcsl/protocol.hpp"
#include "bcsl/robust_agg.hpp"
#include "bcsl/theory.hpp"

namespace bcsl::exp {

// Invalid configuration; what() starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr const char* kMetricsHeader =
    "run_id,replicate,algo,rule,t,err_star,err_hat,test_error,inner_iters,elapsed_ms";

struct DataSource {
  bool synthetic = true;
  data::SyntheticSpec synth;
  data::CsvSchema csv;
  std::size_t test_size = 0;
};

/// lambda for the proximal variant: a fixed value (optionally one per
/// initialization) or one of the two order-of-magnitude rules.
struct LambdaSpec {
  enum class Mode { fixed, linear_pn, glm_default };
  Mode mode = Mode::linear_pn;
  double value = 0.0;
  std::optional<double> zero_init_value;
  std::optional<double> local_init_value;
  double c = 1.0;
};

struct PenaltySpec {
  glm::Penalty::Kind kind = glm::Penalty::Kind::none;
  double gamma = 0.0;
  // gamma = scale * sqrt(log p / N), p the feature count, N the training rows.
  bool paper_sparse_rule = false;
  double scale = 0.2;
};

struct TheorySettings {
  bool enabled = true;
  double epsilon = 1.0 / 6.0;
  double D = 10.0;
  // Skip the Hessian-based rho / delta estimates above this dimension.
  std::size_t max_hessian_dim = 200;
};

struct RunConfig {
  std::string name = "run";
  DataSource data;
  glm::Family family = glm::Family::logistic;
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  double beta = 0.2;
  std::vector<protocol::Algorithm> algorithms{protocol::Algorithm::bcsl,
                                              protocol::Algorithm::bcslp};
  std::vector<agg::AggRule::Kind> rules{agg::AggRule::Kind::median,
                                        agg::AggRule::Kind::trimmed,
                                        agg::AggRule::Kind::mean};
  std::vector<protocol::InitKind> inits{protocol::InitKind::zero};
  LambdaSpec lambda;
  int T = 10;
  adversary::AttackSpec attack = adversary::AttackSpec::sign_flip(3.0);
  PenaltySpec penalty;
  solver::SolverOptions solver;
  int centralized_max_iter = 5000;
  data::ShardPolicy shard_policy = data::ShardPolicy::clip;
  int replicates = 5;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  TheorySettings theory;
  bool timing = false;

  // Throws ConfigError on the first violated field.
  void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

struct Variant {
  protocol::Algorithm algorithm = protocol::Algorithm::bcsl;
  agg::AggRule rule = agg::AggRule::median();
  protocol::InitKind init = protocol::InitKind::zero;
  // "BCSL-md", "BCSLp-tr", ...
  std::string label() const;
};

// Cartesian product algorithms x inits x rules, in that nesting order.
std::vector<Variant> expand_variants(const RunConfig& config);

struct TheoryDiagnostics {
  theory::TheoryParams params;
  bool homogeneity_estimated = false;
  theory::BoundReport median_bound;
  theory::BoundReport trimmed_bound;
  double suggested_lambda_linear_pn = 0.0;
  std::optional<double> suggested_lambda_glm;
};

struct ReplicateResult {
  int replicate = 0;
  std::uint64_t seed = 0;
  ParamVec theta_hat;
  std::optional<ParamVec> theta_star;
  bool centralized_converged = false;
  std::optional<double> centralized_err_star;
  std::optional<double> centralized_test_error;
  double gamma = 0.0;
  std::vector<double> lambdas;  // per variant; 0 for the unregularized one
  std::vector<protocol::IterationTrace> traces;  // per variant
  std::optional<TheoryDiagnostics> theory;
  std::string error;  // set when the replicate could not be set up
};

struct ExperimentResult {
  RunConfig config;
  std::vector<Variant> variants;
  std::vector<ReplicateResult> replicates;
  std::size_t requested_n = 0;
  std::size_t effective_n = 0;
  bool clipped = false;
  std::vector<std::string> warnings;

  // Any inner-solve divergence or failed replicate.
  bool aborted() const;
};

/// Runs every replicate (in parallel when threads are available) and every
/// variant on shared data, mask and centralized reference. baseline_only
/// skips the distributed variants.
ExperimentResult run_experiment(const RunConfig& config, bool baseline_only = false);

// run_id column: the config name plus the initialization.
std::string run_id(const RunConfig& config, protocol::InitKind init);

// Metrics CSV text, rows ordered by replicate, variant, t.
std::string metrics_csv(const ExperimentResult& result);

enum class Metric { err_star, err_hat, test_error };

struct CurveStats {
  std::vector<double> mean;    // NaN where no replicate has the metric
  std::vector<double> stddev;  // sample standard deviation, 0 for one value
  std::vector<int> count;
};

CurveStats curve(const ExperimentResult& result, std::size_t variant, Metric metric);

// Summary JSON text with per-variant, per-t mean and std of each metric.
std::string summary_json(const ExperimentResult& result);

struct ExecuteResult {
  std::filesystem::path metrics_path;
  std::filesystem::path summary_path;
  bool aborted = false;
  std::vector<std::string> errors;
};

/// run_experiment plus <output_dir>/<name>_metrics.csv and
/// <name>_summary.json. Files are written even when a run aborted.
ExecuteResult execute(const RunConfig& config);
ExecuteResult write_outputs(const ExperimentResult& result);

struct SuiteBlock {
  std::string name;
  std::size_t n = 0;
  std::size_t effective_n = 0;
  std::size_t m = 0;
  std::vector<std::string> series;  // "<init>/<label>"
  std::vector<std::vector<double>> err_star_mean;
  std::vector<std::vector<double>> err_hat_mean;
  std::optional<double> best_line;  // mean centralized err_star
};

struct SuiteSummary {
  int T = 0;
  std::vector<SuiteBlock> blocks;
  std::vector<std::string> warnings;
  std::size_t series_count() const;
};

/// Runs each configuration and lines the mean curves up per topology.
/// Throws std::invalid_argument on an empty list or mismatched T.
SuiteSummary compare_suite(const std::vector<RunConfig>& configs);
SuiteSummary summarize_suite(const std::vector<ExperimentResult>& results);
std::string suite_json(const SuiteSummary& suite);

}  // namespace bcsl::exp

#endif  // BCSL_EXPERIMENTS_HPP
