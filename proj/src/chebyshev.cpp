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

#include "entsketch/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "entsketch/core.hpp"

namespace entsketch {

double cheb_eval(unsigned k, double t) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (unsigned j = 2; j <= k; ++j) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> extrema_nodes(unsigned k) {
  if (k == 0) throw ParameterError("Chebyshev degree must be at least 1");
  std::vector<double> eta(k + 1);
  for (unsigned j = 0; j <= k; ++j) eta[j] = std::cos(j * std::numbers::pi / k);
  // Pin the endpoints and the center so symmetric nodes stay exact.
  eta[0] = 1.0;
  eta[k] = -1.0;
  if (k % 2 == 0) eta[k / 2] = 0.0;
  return eta;
}

double node_map(unsigned k, double scale, double y) {
  const double k2 = static_cast<double>(k) * k;
  return (k2 * scale * y - scale * (k2 + 1.0)) / (2.0 * k2 + 1.0);
}

InterpolationPlan build_plan(double epsilon, std::uint64_t stream_bound, PlanMode mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (stream_bound < 4) throw ParameterError("stream bound m must be at least 4");
  const double m = static_cast<double>(stream_bound);
  const double ln_m = std::log(m);
  InterpolationPlan plan;
  plan.mode = mode;
  if (mode == PlanMode::additive) {
    const double raw = std::log2(1.0 / epsilon) + std::log2(std::log2(m));
    plan.degree = static_cast<unsigned>(std::max(2.0, std::ceil(raw - 1e-12)));
    const double k1 = plan.degree + 1.0;
    plan.node_precision = epsilon / (12.0 * k1 * k1 * k1 * ln_m);
  } else {
    const double raw = std::ceil(std::log2(1.0 / epsilon) - 1e-12);
    plan.degree = static_cast<unsigned>(std::max(5.0, raw));
    plan.node_precision = epsilon / (3.0 * plan.degree * plan.degree);
  }
  plan.scale = 1.0 / (2.0 * (plan.degree + 1.0) * ln_m);
  const auto eta = extrema_nodes(plan.degree);
  // eta descends, so the images ascend from -l toward 0.
  plan.nodes.resize(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j)
    plan.nodes[j] = node_map(plan.degree, plan.scale, eta[eta.size() - 1 - j]);
  return plan;
}

double interpolate_at_zero(std::span<const double> abscissae, std::span<const double> values) {
  if (abscissae.size() != values.size()) throw ParameterError("abscissae and values differ in length");
  const std::size_t n = abscissae.size();
  if (n < 2) throw ParameterError("interpolation needs at least two points");
  std::vector<double> y(abscissae.begin(), abscissae.end());
  {
    auto sorted = y;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParameterError("interpolation abscissae must be pairwise distinct");
  }
  std::vector<double> c(values.begin(), values.end());
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) c[i] = (c[i] - c[i - 1]) / (y[i] - y[i - level]);
  }
  // Horner on the Newton form at t = 0.
  double p = c[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) p = c[i] + (0.0 - y[i]) * p;
  return p;
}

double interpolate_at_zero(std::span<const std::pair<double, double>> points) {
  std::vector<double> y;
  std::vector<double> v;
  y.reserve(points.size());
  v.reserve(points.size());
  for (const auto& [a, b] : points) {
    y.push_back(a);
    v.push_back(b);
  }
  return interpolate_at_zero(y, v);
}

}  // namespace entsketch
