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

#include "bcsl/core.hpp"

#include <algorithm>
#include <cmath>

#include "bcsl/rng.hpp"

namespace bcsl {

std::size_t floor_fraction(double frac, std::size_t count) {
  return static_cast<std::size_t>(
      std::floor(frac * static_cast<double>(count) + 1e-9));
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

double l2_norm(std::span<const double> v) {
  if (!all_finite(v)) throw std::invalid_argument("l2_norm: non-finite input");
  // Scaled accumulation keeps huge Byzantine entries from overflowing.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : v) {
    const double r = x / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l2_distance: length mismatch");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return l2_norm(diff);
}

ParamVec::ParamVec(std::vector<double> values) : values_(std::move(values)) {
  if (!all_finite(values_))
    throw std::invalid_argument("ParamVec: non-finite entry");
}

Dataset::Dataset(std::size_t rows, std::size_t cols,
                 std::vector<double> features, std::vector<double> labels,
                 LabelKind kind)
    : rows_(rows),
      cols_(cols),
      features_(std::move(features)),
      labels_(std::move(labels)),
      kind_(kind) {
  if (cols_ == 0) throw std::invalid_argument("Dataset: zero columns");
  if (features_.size() != rows_ * cols_)
    throw std::invalid_argument("Dataset: feature buffer is not rows x cols");
  if (labels_.size() != rows_)
    throw std::invalid_argument("Dataset: label count differs from row count");
  if (!all_finite(features_))
    throw std::invalid_argument("Dataset: non-finite feature entry");
  if (!all_finite(labels_))
    throw std::invalid_argument("Dataset: non-finite label");
  if (kind_ == LabelKind::binary) {
    for (double y : labels_)
      if (y != 0.0 && y != 1.0)
        throw std::invalid_argument("Dataset: binary labels must be 0 or 1");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> feats;
  std::vector<double> labs;
  feats.reserve(indices.size() * cols_);
  labs.reserve(indices.size());
  for (auto i : indices) {
    if (i >= rows_) throw std::out_of_range("Dataset::subset: index out of range");
    auto r = row(i);
    feats.insert(feats.end(), r.begin(), r.end());
    labs.push_back(labels_[i]);
  }
  return Dataset(indices.size(), cols_, std::move(feats), std::move(labs), kind_);
}

std::vector<std::size_t> Dataset::all_indices() const {
  std::vector<std::size_t> idx(rows_);
  for (std::size_t i = 0; i < rows_; ++i) idx[i] = i;
  return idx;
}

ShardAssignment::ShardAssignment(std::vector<std::vector<std::size_t>> shards,
                                 std::size_t total_rows)
    : shards_(std::move(shards)) {
  if (shards_.size() < 2)
    throw std::invalid_argument("ShardAssignment: need a master and at least one worker");
  const std::size_t n = shards_.front().size();
  if (n == 0) throw std::invalid_argument("ShardAssignment: empty shard");
  std::vector<bool> seen(total_rows, false);
  for (const auto& s : shards_) {
    if (s.size() != n)
      throw std::invalid_argument("ShardAssignment: shards must have equal size");
    for (auto i : s) {
      if (i >= total_rows)
        throw std::invalid_argument("ShardAssignment: index out of range");
      if (seen[i])
        throw std::invalid_argument("ShardAssignment: shards overlap");
      seen[i] = true;
    }
  }
}

Shard ShardAssignment::shard(MachineId id) const {
  if (id < 1 || static_cast<std::size_t>(id) > shards_.size())
    throw std::out_of_range("ShardAssignment: machine id out of range");
  return shards_[static_cast<std::size_t>(id - 1)];
}

std::vector<std::size_t> ShardAssignment::allocated() const {
  std::vector<std::size_t> all;
  all.reserve(shards_.size() * shard_size());
  for (const auto& s : shards_) all.insert(all.end(), s.begin(), s.end());
  return all;
}

ByzantineMask::ByzantineMask(std::size_t num_workers, double alpha,
                             std::vector<MachineId> corrupted)
    : num_workers_(num_workers), alpha_(alpha), corrupted_(std::move(corrupted)) {
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw std::invalid_argument("ByzantineMask: alpha must lie in [0, 1/2)");
  std::sort(corrupted_.begin(), corrupted_.end());
  if (std::adjacent_find(corrupted_.begin(), corrupted_.end()) != corrupted_.end())
    throw std::invalid_argument("ByzantineMask: duplicate worker id");
  if (corrupted_.size() != floor_fraction(alpha, num_workers))
    throw std::invalid_argument("ByzantineMask: |corrupted| must equal floor(alpha m)");
  for (auto id : corrupted_) {
    if (id == kMasterId)
      throw std::invalid_argument("ByzantineMask: the master cannot be Byzantine");
    if (id < 2 || static_cast<std::size_t>(id) > num_workers + 1)
      throw std::invalid_argument("ByzantineMask: worker id out of range");
  }
}

ByzantineMask ByzantineMask::none(std::size_t num_workers) {
  return ByzantineMask(num_workers, 0.0, {});
}

ByzantineMask ByzantineMask::random(std::size_t num_workers, double alpha,
                                    std::uint64_t seed) {
  std::vector<MachineId> ids;
  for (std::size_t k = 0; k < num_workers; ++k)
    ids.push_back(static_cast<MachineId>(k + 2));
  Rng rng(seed);
  rng.shuffle(ids);
  ids.resize(floor_fraction(alpha, num_workers));
  return ByzantineMask(num_workers, alpha, std::move(ids));
}

bool ByzantineMask::is_byzantine(MachineId id) const {
  return std::binary_search(corrupted_.begin(), corrupted_.end(), id);
}

}  // namespace bcsl
