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

#ifndef BCSL_DATA_IO_HPP
#define BCSL_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bcsl/core.hpp"

namespace bcsl::data {

enum class Scenario { logistic_dense, logistic_sparse, linear };
enum class SigmaSpec { paper_diag, identity };

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario s);
SigmaSpec parse_sigma(std::string_view name);

struct SyntheticSpec {
  Scenario scenario = Scenario::logistic_dense;
  std::size_t N = 1000;
  std::size_t p = 10;
  double theta_norm = 3.0;
  SigmaSpec sigma = SigmaSpec::paper_diag;
  double noise_sd = 1.0;  // linear scenario only
  std::size_t nonzeros = 10;  // logistic_sparse only
  std::uint64_t seed = 1;
};

struct Generated {
  Dataset data;       // N x (p + 1), column 0 is the intercept
  ParamVec theta_star;
};

// Variances of u for the dense scenario: (8, 4, 4, 2, 1, ..., 1).
std::vector<double> paper_diag_variances(std::size_t p);

/// x = (1, u), u ~ N(0, Sigma), theta* uniform on the sphere of radius
/// theta_norm in R^{p+1}, y ~ Bernoulli(sigmoid(x'theta*)).
Generated gen_logistic_dense(std::size_t N, std::size_t p, std::uint64_t seed,
                             double theta_norm = 3.0,
                             SigmaSpec sigma = SigmaSpec::paper_diag);

/// u ~ N(0, I_p), theta* = (0, v, 0, ..., 0) with v ~ N(0, I_k) rescaled to
/// norm theta_norm on the k leading non-intercept coordinates.
Generated gen_logistic_sparse(std::size_t N, std::uint64_t seed, std::size_t p = 1000,
                              std::size_t nonzeros = 10, double theta_norm = 3.0);

// y = x'theta* + noise_sd * N(0, 1), x as in the dense scenario.
Generated gen_linear(std::size_t N, std::size_t p, std::uint64_t seed,
                     double noise_sd = 1.0, double theta_norm = 3.0,
                     SigmaSpec sigma = SigmaSpec::identity);

Generated generate(const SyntheticSpec& spec);

struct CsvSchema {
  std::string path;
  int label_column = -1;  // negative counts from the end
  char delimiter = ',';
  bool header = false;
  bool standardize = true;  // applied after splitting, see Standardizer
  bool add_intercept = true;
};

/// Parses one sample per row. Labels are binary when every label is 0 or 1.
/// Throws std::runtime_error naming the row (and column) on ragged rows or
/// non-numeric cells, and on a missing file.
Dataset load_csv(const CsvSchema& schema);

/// Column standardization fitted on a subset of rows. Column 0 is left
/// alone when it is the intercept; constant columns are only centered.
class Standardizer {
 public:
  static Standardizer fit(const Dataset& data, Shard rows, bool skip_first_column);
  Dataset apply(const Dataset& data) const;

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& scales() const { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

enum class ShardPolicy {
  strict,  // error when (m + 1) n rows are not available
  clip,    // shrink n to floor(available / (m + 1))
};

struct SplitResult {
  ShardAssignment shards;
  std::vector<std::size_t> test_indices;
  std::vector<MachineId> eligible_workers;  // ids that may be Byzantine
  std::size_t requested_n = 0;
  std::size_t effective_n = 0;
  bool clipped = false;
};

// Largest n with test_size + (m + 1) n <= rows.
std::size_t max_feasible_shard_size(std::size_t rows, std::size_t test_size,
                                    std::size_t m);

/// Random disjoint test set and m + 1 shards of size n, deterministic in seed.
SplitResult split_and_shard(const Dataset& data, std::size_t test_size,
                            std::size_t m, std::size_t n, std::uint64_t seed,
                            ShardPolicy policy = ShardPolicy::strict);

}  // namespace bcsl::data

#endif  // BCSL_DATA_IO_HPP
