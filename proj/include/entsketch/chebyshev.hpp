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

#ifndef ENTSKETCH_CHEBYSHEV_HPP_
#define ENTSKETCH_CHEBYSHEV_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace entsketch {

// P_k(t) by the three-term recurrence.
double cheb_eval(unsigned k, double t);

// cos(j*pi/k) for j = 0..k, descending from 1 to -1.
std::vector<double> extrema_nodes(unsigned k);

// Affine map sending [-1, 1] onto [-l, -l/(2k^2+1)].
double node_map(unsigned k, double scale, double y);

enum class PlanMode { additive, multiplicative };

struct InterpolationPlan {
  PlanMode mode = PlanMode::additive;
  unsigned degree = 2;          // k
  double scale = 0.0;           // l
  std::vector<double> nodes;    // y_0..y_k, increasing toward 0
  double node_precision = 0.0;  // per-node multiplicative accuracy
};

// Additive: k = max(2, ceil(log2(1/eps) + log2 log2 m)),
//           precision = eps / (12 (k+1)^3 ln m).
// Multiplicative: k = max(5, ceil(log2(1/eps))), precision = eps / (3 k^2).
// Both use l = 1 / (2 (k+1) ln m).
InterpolationPlan build_plan(double epsilon, std::uint64_t stream_bound, PlanMode mode);

// p(0) for the interpolating polynomial through (y_i, v_i).
double interpolate_at_zero(std::span<const std::pair<double, double>> points);
double interpolate_at_zero(std::span<const double> abscissae, std::span<const double> values);

}  // namespace entsketch

#endif  // ENTSKETCH_CHEBYSHEV_HPP_
