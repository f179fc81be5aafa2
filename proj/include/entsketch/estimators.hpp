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

#ifndef ENTSKETCH_ESTIMATORS_HPP_
#define ENTSKETCH_ESTIMATORS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "entsketch/chebyshev.hpp"
#include "entsketch/core.hpp"
#include "entsketch/exact_oracle.hpp"

namespace entsketch {

// Probability cut below which no element is treated as heavy, and the
// weakest heavy-element premise used by the residual combination.
inline constexpr double kNoHeavyCut = 5.0 / 6.0;
inline constexpr double kHeavyFloor = 2.0 / 3.0;

// |1 - sum x_i^a| >= C |a - 1| whenever every x_i <= 5/6. Worked out from
// the two branches of the argument: ln(6/5) for a < 1 and 1/6 for a > 1.
inline constexpr double kLargeDifferenceC = 1.0 / 6.0;
// Residual-combination constants for a heavy element x_i >= 2/3:
// a < 1 uses D1 = (2 + ln 3) / ln 3, a > 1 uses D2 = 3.
double approx_difference_d1();
inline constexpr double kApproxDifferenceD2 = 3.0;
// Derivative ratio of ln on [4/9, 1]; a (1 + e)-estimate of t - 1 gives a
// (1 + 9e/4)-estimate of ln t.
inline constexpr double kLogApproxRatio = 9.0 / 4.0;

// Parameters of the one-point Shannon estimator.
struct OnePointConfig {
  double epsilon = 0.0;
  double mu = 0.0;          // eps / (4 ln m)
  double nu = 0.0;          // eps / (4 ln n ln m)
  double alpha_star = 1.0;  // 1 + mu / (16 ln(1/mu))
  double beta_star = 1.0;   // 1 + nu / (16 ln(1/nu))
  double y0 = 0.0;          // beta_star - 1
  double moment_precision = 0.0;  // eps * y0

  static OnePointConfig make(double epsilon, std::uint64_t universe_size, std::uint64_t stream_bound);

  // 4 (a - 1) H_1, and the bound 2 (xi ln n + xi ln(1/xi)) on H_1 - H_a.
  static double xi(double alpha, double shannon_entropy);
  static double error_bound(double xi, std::uint64_t universe_size);
};

enum class ShannonMethod { multipoint, onepoint };

struct EntropyRequest {
  Quantity quantity;
  Guarantee guarantee;
  StreamModel model = StreamModel::strict_turnstile;
  std::uint64_t universe_size = 1;
  std::uint64_t stream_bound = 4;  // m
  double delta = 0.25;
  std::uint64_t seed = 0;
  ShannonMethod shannon_method = ShannonMethod::multipoint;
  LogBase base = LogBase::natural;

  void validate() const;
};

// Groups per block and blocks for the Shannon estimators. The node sketches
// share their draws, so node ratios are far more precise than the per-node
// precision alone would suggest; see shannon_sizing().
struct ShannonSizing {
  std::uint64_t groups_per_block = 1;
  std::uint64_t blocks = 1;
  std::uint64_t rows() const noexcept { return 3 * groups_per_block * blocks; }
};

inline constexpr double kShannonGroupConstant = 2.0;
// groups_per_block = ceil(2 / eps^2), blocks = ceil(8 ln(1/delta)) (odd).
ShannonSizing shannon_sizing(double epsilon, double delta);

// F_a / F_1^a. Throws UndefinedInputError unless f1 > 0.
double normalize_general_update(double f_alpha, double f1, double alpha);

// Value from moment estimates (exact-moment injection uses these directly).
double renyi_from_moments(double f_alpha, double l1, double alpha);
double tsallis_from_moments(double f_alpha, double l1, double alpha);
double shannon_from_onepoint(double f_beta, double l1, double y0);
// T(y) = (1 - ratio) / y where ratio estimates sum x_i^(1+y).
double tsallis_node_value(double ratio, double y);

// The multipoint combination on oracle values: interpolates exact Tsallis
// entropies at the plan nodes.
double shannon_multipoint_exact(const FrequencyVector& fv, const InterpolationPlan& plan);
double shannon_onepoint_exact(const FrequencyVector& fv, const OnePointConfig& config);

EstimateReport shannon_onepoint_additive(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport shannon_multipoint_additive(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport shannon_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport renyi_additive(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport renyi_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport tsallis_additive(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport tsallis_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport moment_estimate(std::span<const UpdateEvent> events, const EntropyRequest& request);
EstimateReport residual_estimate(std::span<const UpdateEvent> events, const EntropyRequest& request);

// Dispatches on quantity and guarantee. With delta < 1/4 the estimate is the
// median of ceil(8 ln(1/delta)) independent instances.
EstimateReport estimate_stream(std::span<const UpdateEvent> events, const EntropyRequest& request);

// Exact value of the requested quantity (natural log).
double exact_value(const FrequencyVector& fv, const Quantity& quantity);

}  // namespace entsketch

#endif  // ENTSKETCH_ESTIMATORS_HPP_
