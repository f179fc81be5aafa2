// Copyright 2026 The entsketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENTSKETCH_RANDOM_ORACLE_HPP_
#define ENTSKETCH_RANDOM_ORACLE_HPP_

#include <cstdint>

namespace entsketch {

// Seeded pseudorandomness standing in for a random oracle: every value is a
// pure function of (seed, row, index), so nothing is stored and sketches
// built from the same seed agree exactly.

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministically derives an independent child seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(seed ^ mix64(salt + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t oracle_word(std::uint64_t seed, std::uint64_t row, std::uint64_t index) noexcept {
  return mix64(mix64(seed ^ (row * 0xD6E8FEB86659FD93ULL)) ^ (index * 0xC2B2AE3D27D4EB4FULL));
}

// Maps 53 random bits to the open interval (0,1).
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct UniformPair {
  double u;  // (0,1)
  double v;  // (0,1)
};

constexpr UniformPair oracle_uniforms(std::uint64_t seed, std::uint64_t row, std::uint64_t index) noexcept {
  const std::uint64_t w = oracle_word(seed, row, index);
  return {to_open_unit(w), to_open_unit(mix64(w))};
}

constexpr bool oracle_bit(std::uint64_t seed, std::uint64_t row, std::uint64_t index) noexcept {
  return (oracle_word(seed, row, index) >> 63) != 0;
}

// Pairwise-independent h(x) = ((a x + b) mod p) mod buckets, p = 2^61 - 1.
class PairwiseHash {
 public:
  static constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

  PairwiseHash() = default;
  PairwiseHash(std::uint64_t seed, std::uint64_t buckets);

  std::uint64_t operator()(std::uint64_t x) const noexcept;
  std::uint64_t buckets() const noexcept { return buckets_; }
  std::uint64_t a() const noexcept { return a_; }
  std::uint64_t b() const noexcept { return b_; }

 private:
  std::uint64_t a_ = 1;
  std::uint64_t b_ = 0;
  std::uint64_t buckets_ = 1;
};

}  // namespace entsketch

#endif  // ENTSKETCH_RANDOM_ORACLE_HPP_
