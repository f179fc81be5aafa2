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

#ifndef ENTSKETCH_HARNESS_HPP_
#define ENTSKETCH_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "entsketch/core.hpp"
#include "entsketch/estimators.hpp"
#include "entsketch/exact_oracle.hpp"

namespace entsketch {

enum class StreamFamily { uniform, point_mass, zipf, heavy_plus_uniform, deletion_churn };

std::string_view to_string(StreamFamily family);
StreamFamily parse_stream_family(std::string_view text);

// Synthetic stream description. Only the fields used by `family` matter:
//   uniform             n, length
//   point_mass          length (all mass on index 1)
//   zipf                n, zipf_s, length
//   heavy_plus_uniform  n, heavy_weight, length (index 1 heavy, 2..n uniform)
//   deletion_churn      base, churn_fraction
struct StreamSpec {
  StreamFamily family = StreamFamily::uniform;
  std::uint64_t n = 1;
  std::uint64_t length = 1;  // m
  double zipf_s = 1.0;
  double heavy_weight = 0.5;
  std::vector<std::int64_t> base;
  double churn_fraction = 0.0;
  StreamModel model = StreamModel::strict_turnstile;
  std::uint64_t seed = 0;

  static StreamSpec uniform(std::uint64_t n, std::uint64_t m, std::uint64_t seed = 0);
  static StreamSpec point_mass(std::uint64_t m, std::uint64_t seed = 0);
  static StreamSpec zipf(double s, std::uint64_t n, std::uint64_t m, std::uint64_t seed = 0);
  static StreamSpec heavy_plus_uniform(double w_max, std::uint64_t n, std::uint64_t m, std::uint64_t seed = 0);
  static StreamSpec deletion_churn(std::vector<std::int64_t> base, double churn, std::uint64_t seed = 0);

  void validate() const;
  std::uint64_t universe_size() const;
};

// Net vector the family is defined to produce. In the general model the sign
// of each index is drawn from the seed; strict streams are nonnegative.
std::vector<std::int64_t> net_counts(const StreamSpec& spec);

// Unit updates in a seeded order. Churn pairs are inserted before they are
// deleted in the strict model and in either order in the general model.
std::vector<UpdateEvent> generate(const StreamSpec& spec);
Stream generate_stream(const StreamSpec& spec);

// One event per nonzero coordinate of the net vector, in index order.
std::vector<UpdateEvent> coalesce(std::uint64_t universe_size, std::span<const UpdateEvent> events);

struct TrialSummary {
  std::uint64_t trials = 0;
  std::uint64_t within_tolerance = 0;
  double empirical_rate = 0.0;
  double mean_abs_error = 0.0;
  double mean_rel_error = 0.0;
  bool truncated = false;  // stopped early by the time budget
};

struct TrialOptions {
  std::optional<double> time_budget_seconds;
};

// Trial t sketches the (coalesced) stream with seed derive_seed(request.seed,
// t) and checks the estimate against the exact value under the request's
// guarantee. Outcomes without a value count as misses.
TrialSummary run_trials(const StreamSpec& spec, const EntropyRequest& request, std::uint64_t trials,
                        const TrialOptions& options = {});

}  // namespace entsketch

#endif  // ENTSKETCH_HARNESS_HPP_
