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

#ifndef ENTSKETCH_HEAVY_HITTER_HPP_
#define ENTSKETCH_HEAVY_HITTER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entsketch/core.hpp"
#include "entsketch/random_oracle.hpp"

namespace entsketch {

inline constexpr double kDetectThreshold = 0.75;
inline constexpr double kBitThreshold = 0.6;
inline constexpr std::uint32_t kDefaultRepetitions = 10;

// ceil(20 / eps) bins per repetition.
std::uint64_t heavy_hitter_bins(double epsilon);

// Finds one element holding most of the L1 mass: hashes indices into bins
// (one independent hash per repetition) and recovers the index bit by bit
// from per-bit weight counters.
class HeavyHitterSketch {
 public:
  HeavyHitterSketch(std::uint64_t universe_size, double epsilon, std::uint64_t seed,
                    std::uint32_t repetitions = kDefaultRepetitions);

  void update(const UpdateEvent& e);
  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) update(e);
  }

  // True iff every repetition has a bin with |weight| >= threshold * mass,
  // where mass is the sum of |bin weights| (equal to the total in the strict
  // model). Throws UndefinedInputError on an all-zero sketch.
  bool detect(double threshold = kDetectThreshold) const;

  // Assembles the index bit by bit; bit b is set iff its counter holds at
  // least 3/5 of the total, with signs flipped when the total is negative.
  // Meaningful only when a heavy element exists.
  std::uint64_t identify() const;

  // Bin of largest |weight| in a repetition, and that weight.
  std::uint64_t heaviest_bin(std::uint32_t rep) const;
  std::int64_t bin_weight(std::uint32_t rep, std::uint64_t bin) const;
  std::uint64_t bin_of(std::uint32_t rep, std::uint64_t index) const { return hashes_.at(rep)(index); }
  // Sum of |bin weights| in one repetition.
  std::uint64_t mass(std::uint32_t rep) const;

  // True iff `index` hashes to the heaviest bin in every repetition and that
  // bin passes the threshold.
  bool certifies(std::uint64_t index, double threshold = kDetectThreshold) const;

  std::uint64_t universe_size() const noexcept { return n_; }
  std::uint64_t bins() const noexcept { return bins_; }
  std::uint32_t repetitions() const noexcept { return reps_; }
  std::uint32_t bit_count() const noexcept { return static_cast<std::uint32_t>(bits_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }
  double epsilon() const noexcept { return epsilon_; }
  std::int64_t total() const noexcept { return total_; }
  const std::vector<std::int64_t>& bit_counters() const noexcept { return bits_; }
  std::uint64_t space_words() const noexcept { return reps_ * bins_ + bits_.size() + 1; }

  void merge(const HeavyHitterSketch& other);

  void serialize(std::ostream& out) const;
  static HeavyHitterSketch deserialize(std::istream& in);
  std::string to_bytes() const;
  static HeavyHitterSketch from_bytes(const std::string& bytes);

 private:
  std::uint64_t n_;
  double epsilon_;
  std::uint64_t seed_;
  std::uint32_t reps_;
  std::uint64_t bins_;
  std::vector<PairwiseHash> hashes_;
  std::vector<std::int64_t> weights_;  // rep-major
  std::vector<std::int64_t> bits_;
  std::int64_t total_ = 0;
};

}  // namespace entsketch

#endif  // ENTSKETCH_HEAVY_HITTER_HPP_
