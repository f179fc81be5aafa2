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

#ifndef ENTSKETCH_RESIDUAL_HPP_
#define ENTSKETCH_RESIDUAL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "entsketch/core.hpp"
#include "entsketch/exact_oracle.hpp"
#include "entsketch/heavy_hitter.hpp"
#include "entsketch/stable_sketch.hpp"

namespace entsketch {

enum class ResidualCase { l1, bucketed, deletion_trick };

// l1 for alpha = 1, deletion_trick for alpha in [1/3, 1), bucketed otherwise.
ResidualCase residual_case(double alpha);

// Median-of-means layout for one estimator instance: a single block of
// ceil(c_var / eps^2) groups at delta >= 1/4, else ceil(8 ln(1/delta)) blocks.
MomentSizing instance_sizing(double epsilon, double delta, double c_var = kDefaultVarianceConstant);

// Heavy element located by a heavy-hitter sketch, with the L1 mass outside
// its bin. Strict turnstile only.
struct HeavyElement {
  std::uint64_t index = 0;
  double residual_l1 = 0.0;  // max over repetitions of total - heavy bin
};

// Detects, identifies and certifies. Returns nothing when detection fails
// or the identified index does not sit in the heavy bin of every repetition.
std::optional<HeavyElement> locate_heavy(const HeavyHitterSketch& hh, double threshold = kDetectThreshold);

// Heavy count to delete so the heavy entry drops to at most the residual
// error: F_1 - estimated F_1^res, rounded to the nearest integer.
std::int64_t deletion_count(std::int64_t f1, double residual_l1_estimate);

// Single-pass residual moment sketch for strict-turnstile streams. Keeps a
// heavy-hitter sketch plus what the alpha case needs: nothing more for l1,
// one stable sketch per hash bin for bucketed, and a whole-stream stable
// sketch with a finer heavy-hitter sketch for deletion_trick.
class ResidualBucketSketch {
 public:
  ResidualBucketSketch(std::uint64_t universe_size, double alpha, double epsilon, std::uint64_t seed,
                       double delta = 0.25);

  void update(const UpdateEvent& e);
  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) update(e);
  }

  // Outcome::no_heavy_hitter when no heavy element is certified.
  EstimateReport estimate() const;

  ResidualCase residual_case() const noexcept { return case_; }
  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return epsilon_; }
  // Precision of the L1 residual: eps^(1/alpha) for deletion_trick, else eps.
  double l1_precision() const noexcept { return l1_precision_; }
  const HeavyHitterSketch& heavy_hitter() const noexcept { return hh_; }
  const MomentSizing& sizing() const noexcept { return sizing_; }
  std::uint64_t space_words() const;

 private:
  double alpha_;
  double epsilon_;
  double l1_precision_;
  ResidualCase case_;
  std::uint64_t seed_;
  MomentSizing sizing_;
  HeavyHitterSketch hh_;
  std::map<std::uint64_t, StableSketch> bins_;  // bucketed, allocated on first touch
  std::optional<StableSketch> whole_;           // deletion_trick
};

EstimateReport residual_l1(std::span<const UpdateEvent> events, std::uint64_t universe_size, double epsilon,
                           std::uint64_t seed);
EstimateReport residual_bucketed(std::span<const UpdateEvent> events, std::uint64_t universe_size, double alpha,
                                 double epsilon, std::uint64_t seed);
EstimateReport residual_deletion_trick(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                       double alpha, double epsilon, std::uint64_t seed);
// Dispatches on residual_case(alpha).
EstimateReport residual_moment_estimate(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                        double alpha, double epsilon, std::uint64_t seed);

struct BipartitionConstants {
  double c1 = 4.0;
  double c2 = 64.0;
  double c3 = 4.0;
};

// r = c2 * ceil(eps^-2 (ln ln m + ln(c3 / eps))), with ln ln m floored at 0.
std::uint64_t bipartition_trials(double epsilon, std::uint64_t stream_bound, const BipartitionConstants& c = {});

// Residual moments in the general update model: each trial splits the
// universe in two by a random bit and sketches both halves with one group;
// the half without the heavy element estimates half the residual.
class BipartitionResidualSketch {
 public:
  BipartitionResidualSketch(std::uint64_t universe_size, std::uint64_t stream_bound, double alpha, double epsilon,
                            std::uint64_t seed, BipartitionConstants constants = {});

  void update(const UpdateEvent& e);
  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) update(e);
  }

  // Which half (0 or 1) `index` falls in for `trial`.
  unsigned side(std::uint64_t trial, std::uint64_t index) const;
  // 2 * estimate of the moment of the half of `trial` not holding `heavy`.
  double trial_estimate(std::uint64_t trial, std::uint64_t heavy) const;

  EstimateReport estimate() const;

  std::uint64_t trials() const noexcept { return trials_; }
  double alpha() const noexcept { return alpha_; }
  const HeavyHitterSketch& heavy_hitter() const noexcept { return hh_; }
  const StableSketch& halves() const noexcept { return halves_; }
  std::uint64_t space_words() const noexcept { return hh_.space_words() + halves_.space_words(); }

 private:
  double alpha_;
  double epsilon_;
  std::uint64_t seed_;
  std::uint64_t side_seed_;
  std::uint64_t trials_;
  HeavyHitterSketch hh_;
  StableSketch halves_;  // group 2 * trial + side
};

EstimateReport residual_bipartition(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                    std::uint64_t stream_bound, double alpha, double epsilon, std::uint64_t seed);

// Indices grouped by weight class z: |A_i| in [(1 + eps/c1)^z, (1 + eps/c1)^(z+1)).
std::map<std::int64_t, std::vector<std::uint64_t>> weight_classes(const FrequencyVector& fv, double epsilon,
                                                                  double c1 = 4.0);

}  // namespace entsketch

#endif  // ENTSKETCH_RESIDUAL_HPP_
