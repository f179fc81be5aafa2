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

#ifndef ENTSKETCH_EXACT_ORACLE_HPP_
#define ENTSKETCH_EXACT_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "entsketch/core.hpp"

namespace entsketch {

// Exact counts A[1..n] for a turnstile stream. Stores all n counters; this is
// the ground truth the sketches are checked against.
class FrequencyVector {
 public:
  explicit FrequencyVector(std::uint64_t universe_size);
  FrequencyVector(std::uint64_t universe_size, std::span<const UpdateEvent> events);
  static FrequencyVector from_counts(std::span<const std::int64_t> counts);

  void apply(const UpdateEvent& e);
  void apply(std::span<const UpdateEvent> events) {
    for (const auto& e : events) apply(e);
  }

  std::uint64_t universe_size() const noexcept { return counts_.size(); }
  std::int64_t count(std::uint64_t index) const { return counts_.at(index - 1); }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::uint64_t l1() const noexcept { return l1_; }
  bool nonnegative() const noexcept;

  // x_i = |A_i| / ||A||_1 for the positive entries, in index order.
  std::vector<double> distribution() const;
  // 1-based index of the largest |A_i|; lowest index wins ties. 0 if empty.
  std::uint64_t heaviest_index() const;

 private:
  std::vector<std::int64_t> counts_;
  std::uint64_t l1_ = 0;
};

// F_alpha = sum |A_i|^alpha.
double moment(const FrequencyVector& fv, double alpha);
// F_alpha minus the largest |A_i|^alpha.
double residual_moment(const FrequencyVector& fv, double alpha);

// Entropies in nats. All require ||A||_1 > 0.
double shannon(const FrequencyVector& fv);
double renyi(const FrequencyVector& fv, double alpha);
double tsallis(const FrequencyVector& fv, double alpha);

// The same quantities on an explicit probability vector (zeros allowed).
double shannon(std::span<const double> x);
double renyi(std::span<const double> x, double alpha);
double tsallis(std::span<const double> x, double alpha);
// sum_i x_i^alpha - 1, accurate when alpha is close to 1.
double power_sum_minus_one(std::span<const double> x, double alpha);

struct DerivativeProbe {
  unsigned order = 0;  // k
  double point = 0.0;  // a >= -1
  double value = 0.0;  // G_k(a) = sum x_i^(1+a) ln^k(x_i)
};

DerivativeProbe derivative_sum(const FrequencyVector& fv, unsigned order, double point);
double derivative_sum(std::span<const double> x, unsigned order, double point);

}  // namespace entsketch

#endif  // ENTSKETCH_EXACT_ORACLE_HPP_
