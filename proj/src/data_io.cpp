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

#include "bcsl/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bcsl/glm.hpp"
#include "bcsl/rng.hpp"

namespace bcsl::data {

namespace {

std::vector<double> sphere_direction(std::size_t dim, double radius, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    for (auto& x : v) x = rng.normal();
    norm = l2_norm(v);
  } while (norm == 0.0);
  for (auto& x : v) x *= radius / norm;
  return v;
}

std::vector<double> variances_for(SigmaSpec sigma, std::size_t p) {
  if (sigma == SigmaSpec::identity) return std::vector<double>(p, 1.0);
  return paper_diag_variances(p);
}

// Design rows (1, u) with independent u_j ~ N(0, var_j).
std::vector<double> gaussian_design(std::size_t N, std::span<const double> var, Rng& rng) {
  const std::size_t p = var.size();
  std::vector<double> sd(p);
  for (std::size_t j = 0; j < p; ++j) sd[j] = std::sqrt(var[j]);
  std::vector<double> x(N * (p + 1));
  for (std::size_t i = 0; i < N; ++i) {
    double* row = x.data() + i * (p + 1);
    row[0] = 1.0;
    for (std::size_t j = 0; j < p; ++j) row[j + 1] = sd[j] * rng.normal();
  }
  return x;
}

std::vector<double> bernoulli_labels(std::span<const double> x, std::size_t cols,
                                     std::span<const double> theta, Rng& rng) {
  const std::size_t N = x.size() / cols;
  std::vector<double> y(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double z = dot(x.subspan(i * cols, cols), theta);
    y[i] = rng.uniform() < glm::sigmoid(z) ? 1.0 : 0.0;
  }
  return y;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view name) {
  if (name == "logistic_dense") return Scenario::logistic_dense;
  if (name == "logistic_sparse") return Scenario::logistic_sparse;
  if (name == "linear") return Scenario::linear;
  throw std::invalid_argument("unknown scenario: " + std::string(name));
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::logistic_dense: return "logistic_dense";
    case Scenario::logistic_sparse: return "logistic_sparse";
    case Scenario::linear: return "linear";
  }
  return "logistic_dense";
}

SigmaSpec parse_sigma(std::string_view name) {
  if (name == "paper_diag" || name == "diag") return SigmaSpec::paper_diag;
  if (name == "identity") return SigmaSpec::identity;
  throw std::invalid_argument("unknown sigma spec: " + std::string(name));
}

std::vector<double> paper_diag_variances(std::size_t p) {
  if (p < 5) throw std::invalid_argument("paper_diag covariance needs p >= 5");
  std::vector<double> v(p, 1.0);
  v[0] = 8.0;
  v[1] = 4.0;
  v[2] = 4.0;
  v[3] = 2.0;
  return v;
}

Generated gen_logistic_dense(std::size_t N, std::size_t p, std::uint64_t seed,
                             double theta_norm, SigmaSpec sigma) {
  if (N == 0 || p == 0) throw std::invalid_argument("gen_logistic_dense: N and p must be positive");
  if (!(theta_norm > 0.0)) throw std::invalid_argument("gen_logistic_dense: theta_norm must be > 0");
  const auto var = variances_for(sigma, p);
  Rng rng(seed);
  auto theta = sphere_direction(p + 1, theta_norm, rng);
  auto x = gaussian_design(N, var, rng);
  auto y = bernoulli_labels(x, p + 1, theta, rng);
  return {Dataset(N, p + 1, std::move(x), std::move(y), LabelKind::binary),
          ParamVec(std::move(theta))};
}

Generated gen_logistic_sparse(std::size_t N, std::uint64_t seed, std::size_t p,
                              std::size_t nonzeros, double theta_norm) {
  if (N == 0 || p == 0) throw std::invalid_argument("gen_logistic_sparse: N and p must be positive");
  if (nonzeros == 0 || nonzeros > p)
    throw std::invalid_argument("gen_logistic_sparse: nonzeros must lie in [1, p]");
  Rng rng(seed);
  const auto v = sphere_direction(nonzeros, theta_norm, rng);
  std::vector<double> theta(p + 1, 0.0);
  for (std::size_t j = 0; j < nonzeros; ++j) theta[j + 1] = v[j];
  const std::vector<double> var(p, 1.0);
  auto x = gaussian_design(N, var, rng);
  auto y = bernoulli_labels(x, p + 1, theta, rng);
  return {Dataset(N, p + 1, std::move(x), std::move(y), LabelKind::binary),
          ParamVec(std::move(theta))};
}

Generated gen_linear(std::size_t N, std::size_t p, std::uint64_t seed, double noise_sd,
                     double theta_norm, SigmaSpec sigma) {
  if (N == 0 || p == 0) throw std::invalid_argument("gen_linear: N and p must be positive");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("gen_linear: noise_sd must be >= 0");
  const auto var = variances_for(sigma, p);
  Rng rng(seed);
  auto theta = sphere_direction(p + 1, theta_norm, rng);
  auto x = gaussian_design(N, var, rng);
  std::vector<double> y(N);
  for (std::size_t i = 0; i < N; ++i)
    y[i] = dot(std::span<const double>(x).subspan(i * (p + 1), p + 1), theta) +
           noise_sd * rng.normal();
  return {Dataset(N, p + 1, std::move(x), std::move(y), LabelKind::continuous),
          ParamVec(std::move(theta))};
}

Generated generate(const SyntheticSpec& spec) {
  switch (spec.scenario) {
    case Scenario::logistic_dense:
      return gen_logistic_dense(spec.N, spec.p, spec.seed, spec.theta_norm, spec.sigma);
    case Scenario::logistic_sparse:
      return gen_logistic_sparse(spec.N, spec.seed, spec.p, spec.nonzeros, spec.theta_norm);
    case Scenario::linear:
      return gen_linear(spec.N, spec.p, spec.seed, spec.noise_sd, spec.theta_norm, spec.sigma);
  }
  throw std::logic_error("generate: unknown scenario");
}

Dataset load_csv(const CsvSchema& schema) {
  std::ifstream in(schema.path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + schema.path + "'");

  std::vector<double> feats, labels;
  std::size_t width = 0, rows = 0, line_no = 0;
  std::size_t label_col = 0;
  std::string line;
  std::vector<double> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (schema.header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    cells.clear();
    std::string_view rest(line);
    std::size_t col = 0;
    for (;;) {
      const auto pos = rest.find(schema.delimiter);
      const std::string_view cell = trim(rest.substr(0, pos));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(value))
        throw std::runtime_error("load_csv: non-numeric cell at row " + std::to_string(line_no) +
                                 ", column " + std::to_string(col + 1) + ": '" +
                                 std::string(cell) + "'");
      cells.push_back(value);
      ++col;
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (width == 0) {
      width = cells.size();
      if (width < 2) throw std::runtime_error("load_csv: need at least one feature and a label");
      const int lc = schema.label_column < 0 ? static_cast<int>(width) + schema.label_column
                                             : schema.label_column;
      if (lc < 0 || static_cast<std::size_t>(lc) >= width)
        throw std::runtime_error("load_csv: label column outside the row width");
      label_col = static_cast<std::size_t>(lc);
    } else if (cells.size() != width) {
      throw std::runtime_error("load_csv: ragged row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(width));
    }
    if (schema.add_intercept) feats.push_back(1.0);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) labels.push_back(cells[c]);
      else feats.push_back(cells[c]);
    }
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("load_csv: no data rows in '" + schema.path + "'");
  bool binary = true;
  for (double y : labels) binary = binary && (y == 0.0 || y == 1.0);
  const std::size_t cols = width - 1 + (schema.add_intercept ? 1 : 0);
  return Dataset(rows, cols, std::move(feats), std::move(labels),
                 binary ? LabelKind::binary : LabelKind::continuous);
}

Standardizer Standardizer::fit(const Dataset& data, Shard rows, bool skip_first_column) {
  if (rows.empty()) throw std::invalid_argument("Standardizer::fit: no rows");
  const std::size_t d = data.cols();
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  const double n = static_cast<double>(rows.size());
  for (auto i : rows) {
    const auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += x[j];
  }
  for (auto& m : s.mean_) m /= n;
  std::vector<double> var(d, 0.0);
  for (auto i : rows) {
    const auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - s.mean_[j]) * (x[j] - s.mean_[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  if (skip_first_column) {
    s.mean_[0] = 0.0;
    s.scale_[0] = 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  const std::size_t d = data.cols();
  if (d != mean_.size()) throw std::invalid_argument("Standardizer::apply: width mismatch");
  std::vector<double> feats(data.features().begin(), data.features().end());
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      feats[i * d + j] = (feats[i * d + j] - mean_[j]) / scale_[j];
  std::vector<double> labels(data.labels().begin(), data.labels().end());
  return Dataset(data.rows(), d, std::move(feats), std::move(labels), data.kind());
}

std::size_t max_feasible_shard_size(std::size_t rows, std::size_t test_size, std::size_t m) {
  if (test_size >= rows) return 0;
  return (rows - test_size) / (m + 1);
}

SplitResult split_and_shard(const Dataset& data, std::size_t test_size, std::size_t m,
                            std::size_t n, std::uint64_t seed, ShardPolicy policy) {
  if (m == 0 || n == 0) throw std::invalid_argument("split_and_shard: m and n must be positive");
  SplitResult out;
  out.requested_n = n;
  const std::size_t needed = test_size + (m + 1) * n;
  if (needed > data.rows()) {
    const std::size_t feasible = max_feasible_shard_size(data.rows(), test_size, m);
    if (policy == ShardPolicy::strict || feasible == 0)
      throw std::invalid_argument(
          "split_and_shard: need " + std::to_string(needed) + " rows (test " +
          std::to_string(test_size) + " + " + std::to_string(m + 1) + " x " +
          std::to_string(n) + ") but only " + std::to_string(data.rows()) +
          " are available; max feasible n is " + std::to_string(feasible));
    n = feasible;
    out.clipped = true;
  }
  out.effective_n = n;

  auto perm = data.all_indices();
  Rng rng(seed);
  rng.shuffle(perm);
  out.test_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::vector<std::vector<std::size_t>> shards(m + 1);
  auto it = perm.begin() + static_cast<std::ptrdiff_t>(test_size);
  for (auto& s : shards) {
    s.assign(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
  }
  out.shards = ShardAssignment(std::move(shards), data.rows());
  for (std::size_t k = 0; k < m; ++k) out.eligible_workers.push_back(static_cast<MachineId>(k + 2));
  return out;
}

}  // namespace bcsl::data
