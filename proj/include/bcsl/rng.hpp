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

#ifndef BCSL_RNG_HPP
#define BCSL_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace bcsl {

// Mixes a root seed with a path of stream keys (replicate, worker, round, ...)
// into an independent 64-bit stream seed.
std::uint64_t derive_seed(std::uint64_t root,
                          std::initializer_list<std::uint64_t> keys);

// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kData = 0x64617461;     // "data"
inline constexpr std::uint64_t kSplit = 0x73706c74;    // "splt"
inline constexpr std::uint64_t kMask = 0x6d61736b;     // "mask"
inline constexpr std::uint64_t kAttack = 0x61747463;   // "attc"
}  // namespace stream

/// mt19937_64 with hand-rolled conversions so that draws are identical on
/// every standard library (std::*_distribution output is unspecified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the spare draw is cached.
  double normal();
  // Uniform integer in [0, bound), rejection sampled.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bcsl

#endif  // BCSL_RNG_HPP
