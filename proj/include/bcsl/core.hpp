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

#ifndef BCSL_CORE_HPP
#define BCSL_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcsl {

// Raised when an iterative solve produces a non-finite objective.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Machine ids are 1-based: machine 1 is the master, 2..m+1 are workers.
using MachineId = int;
inline constexpr MachineId kMasterId = 1;

using Shard = std::span<const std::size_t>;

// floor(frac * count) with a small guard so 0.29 * 100 counts as 29.
std::size_t floor_fraction(double frac, std::size_t count);

bool all_finite(std::span<const double> v);

double l2_norm(std::span<const double> v);
double l1_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

/// Dense parameter vector theta in R^d. Entries are always finite and the
/// length is fixed at construction.
class ParamVec {
 public:
  ParamVec() = default;
  explicit ParamVec(std::size_t dim) : values_(dim, 0.0) {}
  explicit ParamVec(std::vector<double> values);
  ParamVec(std::initializer_list<double> values)
      : ParamVec(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  const std::vector<double>& vec() const { return values_; }
  operator std::span<const double>() const { return values_; }

  double norm() const { return l2_norm(values_); }

  friend bool operator==(const ParamVec&, const ParamVec&) = default;

 private:
  std::vector<double> values_;
};

enum class LabelKind { binary, continuous };

/// Row-major N x d feature matrix with one label per row.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols, std::vector<double> features,
          std::vector<double> labels, LabelKind kind);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  LabelKind kind() const { return kind_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * cols_, cols_};
  }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const { return labels_; }
  std::span<const double> features() const { return features_; }

  // Rows picked by `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> all_indices() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> features_;
  std::vector<double> labels_;
  LabelKind kind_ = LabelKind::continuous;
};

/// m + 1 disjoint equal-size index sets. Index 0 of the internal list is
/// machine 1 (the master), which is never Byzantine.
class ShardAssignment {
 public:
  ShardAssignment() = default;
  ShardAssignment(std::vector<std::vector<std::size_t>> shards,
                  std::size_t total_rows);

  std::size_t num_workers() const { return shards_.empty() ? 0 : shards_.size() - 1; }
  std::size_t num_machines() const { return shards_.size(); }
  std::size_t shard_size() const { return shards_.empty() ? 0 : shards_.front().size(); }

  Shard shard(MachineId id) const;
  Shard master() const { return shard(kMasterId); }

  // All allocated indices, machine 1 first.
  std::vector<std::size_t> allocated() const;

 private:
  std::vector<std::vector<std::size_t>> shards_;
};

/// Set of corrupted workers drawn from {2, ..., m+1}; |set| = floor(alpha m).
class ByzantineMask {
 public:
  ByzantineMask() = default;
  ByzantineMask(std::size_t num_workers, double alpha,
                std::vector<MachineId> corrupted);

  static ByzantineMask none(std::size_t num_workers);
  static ByzantineMask random(std::size_t num_workers, double alpha,
                              std::uint64_t seed);

  bool is_byzantine(MachineId id) const;
  const std::vector<MachineId>& corrupted() const { return corrupted_; }
  double alpha() const { return alpha_; }
  std::size_t num_workers() const { return num_workers_; }

 private:
  std::size_t num_workers_ = 0;
  double alpha_ = 0.0;
  std::vector<MachineId> corrupted_;  // sorted
};

struct GradientReport {
  MachineId worker_id = 0;
  std::vector<double> vector;
  bool honest = true;
};

}  // namespace bcsl

#endif  // BCSL_CORE_HPP
