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

#include "entsketch/residual.hpp"

#include <algorithm>
#include <cmath>

#include "entsketch/random_oracle.hpp"

namespace entsketch {

namespace {

constexpr std::uint64_t kStableSalt = 0x5354424C;  // "STBL"
constexpr std::uint64_t kFineSalt = 0x46494E45;    // "FINE"
constexpr std::uint64_t kSideSalt = 0x53494445;    // "SIDE"

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
}

EstimateReport base_report(double alpha, double epsilon, std::uint64_t seed) {
  EstimateReport r;
  r.quantity = Quantity::residual_moment(alpha);
  r.guarantee = Guarantee{GuaranteeKind::multiplicative, epsilon};
  r.success_prob = 0.75;
  r.seed = seed;
  return r;
}

}  // namespace

ResidualCase residual_case(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
  if (alpha == 1.0) return ResidualCase::l1;
  if (alpha >= 1.0 / 3.0 && alpha < 1.0) return ResidualCase::deletion_trick;
  return ResidualCase::bucketed;
}

MomentSizing instance_sizing(double epsilon, double delta, double c_var) {
  MomentSizing s = moment_sizing(epsilon, delta, c_var);
  if (delta >= 0.25) s.blocks = 1;
  return s;
}

std::optional<HeavyElement> locate_heavy(const HeavyHitterSketch& hh, double threshold) {
  if (!hh.detect(threshold)) return std::nullopt;
  const std::uint64_t index = hh.identify();
  if (!hh.certifies(index, threshold)) return std::nullopt;
  HeavyElement h;
  h.index = index;
  for (std::uint32_t r = 0; r < hh.repetitions(); ++r) {
    const double outside = static_cast<double>(hh.mass(r)) -
                           std::abs(static_cast<double>(hh.bin_weight(r, hh.bin_of(r, index))));
    h.residual_l1 = std::max(h.residual_l1, outside);
  }
  return h;
}

std::int64_t deletion_count(std::int64_t f1, double residual_l1_estimate) {
  return std::llround(static_cast<double>(f1) - residual_l1_estimate);
}

ResidualBucketSketch::ResidualBucketSketch(std::uint64_t universe_size, double alpha, double epsilon,
                                           std::uint64_t seed, double delta)
    : alpha_(alpha),
      epsilon_(epsilon),
      l1_precision_(epsilon),
      case_(entsketch::residual_case(alpha)),
      seed_(seed),
      sizing_(instance_sizing(epsilon, delta)),
      hh_(universe_size, epsilon, seed) {
  check_epsilon(epsilon);
  if (case_ == ResidualCase::deletion_trick) {
    l1_precision_ = std::pow(epsilon, 1.0 / alpha);
    hh_ = HeavyHitterSketch(universe_size, l1_precision_, derive_seed(seed, kFineSalt));
    whole_.emplace(alpha, sizing_.rows(), derive_seed(seed, kStableSalt));
  }
}

void ResidualBucketSketch::update(const UpdateEvent& e) {
  hh_.update(e);
  switch (case_) {
    case ResidualCase::l1:
      break;
    case ResidualCase::bucketed: {
      const auto bin = hh_.bin_of(0, e.index);
      auto it = bins_.find(bin);
      if (it == bins_.end())
        it = bins_.emplace(bin, StableSketch(alpha_, sizing_.rows(), derive_seed(seed_, kStableSalt))).first;
      it->second.update(e);
      break;
    }
    case ResidualCase::deletion_trick:
      whole_->update(e);
      break;
  }
}

std::uint64_t ResidualBucketSketch::space_words() const {
  switch (case_) {
    case ResidualCase::l1:
      return hh_.space_words();
    case ResidualCase::bucketed:
      return hh_.space_words() + hh_.bins() * sizing_.rows();
    case ResidualCase::deletion_trick:
      return hh_.space_words() + sizing_.rows();
  }
  return 0;
}

EstimateReport ResidualBucketSketch::estimate() const {
  EstimateReport r = base_report(alpha_, epsilon_, seed_);
  r.space_words_used = space_words();
  if (hh_.total() < 0 || hh_.mass(0) == 0) throw UndefinedInputError("residual moment of an empty stream");
  const auto heavy = locate_heavy(hh_);
  if (!heavy) {
    r.outcome = Outcome::no_heavy_hitter;
    return r;
  }
  switch (case_) {
    case ResidualCase::l1:
      r.value = heavy->residual_l1;
      break;
    case ResidualCase::bucketed: {
      const auto heavy_bin = hh_.bin_of(0, heavy->index);
      std::optional<StableSketch> rest;
      for (const auto& [bin, sk] : bins_) {
        if (bin == heavy_bin) continue;
        if (rest)
          rest->merge(sk);
        else
          rest.emplace(sk);
      }
      r.value = rest ? rest->median_of_means(sizing_) : 0.0;
      break;
    }
    case ResidualCase::deletion_trick: {
      StableSketch trimmed = *whole_;
      const auto d = deletion_count(hh_.total(), heavy->residual_l1);
      if (d != 0) trimmed.update(UpdateEvent{heavy->index, -d});
      r.value = trimmed.median_of_means(sizing_);
      break;
    }
  }
  return r;
}

namespace {

template <typename Sketch>
EstimateReport run_residual(Sketch sketch, std::span<const UpdateEvent> events) {
  sketch.update(events);
  return sketch.estimate();
}

}  // namespace

EstimateReport residual_l1(std::span<const UpdateEvent> events, std::uint64_t universe_size, double epsilon,
                           std::uint64_t seed) {
  return run_residual(ResidualBucketSketch(universe_size, 1.0, epsilon, seed), events);
}

EstimateReport residual_bucketed(std::span<const UpdateEvent> events, std::uint64_t universe_size, double alpha,
                                 double epsilon, std::uint64_t seed) {
  if (residual_case(alpha) != ResidualCase::bucketed)
    throw ParameterError("bucketed residual needs alpha in (0, 1/3) or (1, 2]");
  return run_residual(ResidualBucketSketch(universe_size, alpha, epsilon, seed), events);
}

EstimateReport residual_deletion_trick(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                       double alpha, double epsilon, std::uint64_t seed) {
  if (residual_case(alpha) != ResidualCase::deletion_trick)
    throw ParameterError("deletion-trick residual needs alpha in [1/3, 1)");
  return run_residual(ResidualBucketSketch(universe_size, alpha, epsilon, seed), events);
}

EstimateReport residual_moment_estimate(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                        double alpha, double epsilon, std::uint64_t seed) {
  return run_residual(ResidualBucketSketch(universe_size, alpha, epsilon, seed), events);
}

std::uint64_t bipartition_trials(double epsilon, std::uint64_t stream_bound, const BipartitionConstants& c) {
  check_epsilon(epsilon);
  if (stream_bound < 2) throw ParameterError("stream bound m must be at least 2");
  const double lnln = std::max(0.0, std::log(std::log(static_cast<double>(stream_bound))));
  const double inner = (lnln + std::log(c.c3 / epsilon)) / (epsilon * epsilon);
  return static_cast<std::uint64_t>(c.c2) * static_cast<std::uint64_t>(std::ceil(inner - 1e-9));
}

BipartitionResidualSketch::BipartitionResidualSketch(std::uint64_t universe_size, std::uint64_t stream_bound,
                                                     double alpha, double epsilon, std::uint64_t seed,
                                                     BipartitionConstants constants)
    : alpha_(alpha),
      epsilon_(epsilon),
      seed_(seed),
      side_seed_(derive_seed(seed, kSideSalt)),
      trials_(bipartition_trials(epsilon, stream_bound, constants)),
      hh_(universe_size, epsilon, seed),
      halves_(alpha, 6 * trials_, derive_seed(seed, kStableSalt)) {}

unsigned BipartitionResidualSketch::side(std::uint64_t trial, std::uint64_t index) const {
  return oracle_bit(side_seed_, trial, index) ? 1u : 0u;
}

void BipartitionResidualSketch::update(const UpdateEvent& e) {
  hh_.update(e);
  for (std::uint64_t j = 0; j < trials_; ++j) halves_.update_groups(e, 2 * j + side(j, e.index), 1);
}

double BipartitionResidualSketch::trial_estimate(std::uint64_t trial, std::uint64_t heavy) const {
  return 2.0 * halves_.group_estimate(2 * trial + 1 - side(trial, heavy));
}

EstimateReport BipartitionResidualSketch::estimate() const {
  EstimateReport r = base_report(alpha_, epsilon_, seed_);
  r.space_words_used = space_words();
  if (hh_.mass(0) == 0) throw UndefinedInputError("residual moment of an empty stream");
  const auto heavy = locate_heavy(hh_);
  if (!heavy) {
    r.outcome = Outcome::no_heavy_hitter;
    return r;
  }
  double sum = 0.0;
  for (std::uint64_t j = 0; j < trials_; ++j) sum += trial_estimate(j, heavy->index);
  r.value = sum / static_cast<double>(trials_);
  return r;
}

EstimateReport residual_bipartition(std::span<const UpdateEvent> events, std::uint64_t universe_size,
                                    std::uint64_t stream_bound, double alpha, double epsilon, std::uint64_t seed) {
  BipartitionResidualSketch s(universe_size, stream_bound, alpha, epsilon, seed);
  s.update(events);
  return s.estimate();
}

std::map<std::int64_t, std::vector<std::uint64_t>> weight_classes(const FrequencyVector& fv, double epsilon,
                                                                  double c1) {
  check_epsilon(epsilon);
  const double base = std::log1p(epsilon / c1);
  std::map<std::int64_t, std::vector<std::uint64_t>> classes;
  const auto& counts = fv.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double mag = std::abs(static_cast<double>(counts[i]));
    const auto z = static_cast<std::int64_t>(std::floor(std::log(mag) / base + 1e-12));
    classes[z].push_back(i + 1);
  }
  return classes;
}

}  // namespace entsketch
