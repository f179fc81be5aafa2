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

#include "entsketch/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace entsketch {

namespace {

// Sums in increasing magnitude so the result does not depend on index order.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

void require_mass(std::span<const double> x) {
  for (double v : x) {
    if (v > 0.0) return;
  }
  throw UndefinedInputError("entropy of an empty distribution is undefined");
}

void require_alpha(double alpha, bool allow_one) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  if (!allow_one && alpha == 1.0) throw ParameterError("alpha = 1 is the Shannon limit; use shannon()");
}

std::uint64_t magnitude(std::int64_t v) {
  return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
}

}  // namespace

FrequencyVector::FrequencyVector(std::uint64_t universe_size) : counts_(universe_size, 0) {
  if (universe_size == 0) throw ParameterError("universe size must be positive");
}

FrequencyVector::FrequencyVector(std::uint64_t universe_size, std::span<const UpdateEvent> events)
    : FrequencyVector(universe_size) {
  apply(events);
}

FrequencyVector FrequencyVector::from_counts(std::span<const std::int64_t> counts) {
  FrequencyVector fv(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) fv.apply(UpdateEvent{i + 1, counts[i]});
  }
  return fv;
}

void FrequencyVector::apply(const UpdateEvent& e) {
  if (e.index < 1 || e.index > counts_.size()) throw ParameterError("event index outside universe");
  auto& c = counts_[e.index - 1];
  l1_ -= magnitude(c);
  c += e.delta;
  l1_ += magnitude(c);
}

bool FrequencyVector::nonnegative() const noexcept {
  return std::all_of(counts_.begin(), counts_.end(), [](std::int64_t c) { return c >= 0; });
}

std::vector<double> FrequencyVector::distribution() const {
  std::vector<double> x;
  if (l1_ == 0) return x;
  const double total = static_cast<double>(l1_);
  for (auto c : counts_) {
    if (c != 0) x.push_back(static_cast<double>(magnitude(c)) / total);
  }
  return x;
}

std::uint64_t FrequencyVector::heaviest_index() const {
  std::uint64_t best = 0;
  std::uint64_t best_mag = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const auto m = magnitude(counts_[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i + 1;
    }
  }
  return best;
}

double moment(const FrequencyVector& fv, double alpha) {
  require_alpha(alpha, true);
  std::vector<double> terms;
  terms.reserve(fv.universe_size());
  for (auto c : fv.counts()) {
    if (c != 0) terms.push_back(std::exp(alpha * std::log(static_cast<double>(magnitude(c)))));
  }
  return sorted_sum(terms);
}

double residual_moment(const FrequencyVector& fv, double alpha) {
  require_alpha(alpha, true);
  const std::uint64_t heavy = fv.heaviest_index();
  std::vector<double> terms;
  const auto& counts = fv.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0 && i + 1 != heavy)
      terms.push_back(std::exp(alpha * std::log(static_cast<double>(magnitude(counts[i])))));
  }
  return sorted_sum(terms);
}

double shannon(std::span<const double> x) {
  require_mass(x);
  std::vector<double> terms;
  for (double v : x) {
    if (v > 0.0) terms.push_back(-v * std::log(v));
  }
  return sorted_sum(terms);
}

double power_sum_minus_one(std::span<const double> x, double alpha) {
  // sum x_i^a - 1 = sum x_i (x_i^(a-1) - 1) when sum x_i = 1.
  std::vector<double> terms;
  for (double v : x) {
    if (v > 0.0) terms.push_back(v * std::expm1((alpha - 1.0) * std::log(v)));
  }
  return sorted_sum(terms);
}

double renyi(std::span<const double> x, double alpha) {
  require_alpha(alpha, false);
  require_mass(x);
  const double shifted = power_sum_minus_one(x, alpha);
  // Near 1 the shifted sum keeps the digits; away from 1 the plain sum does.
  if (std::abs(shifted) < 0.5) return std::log1p(shifted) / (1.0 - alpha);
  std::vector<double> terms;
  for (double v : x) {
    if (v > 0.0) terms.push_back(std::exp(alpha * std::log(v)));
  }
  return std::log(sorted_sum(terms)) / (1.0 - alpha);
}

double tsallis(std::span<const double> x, double alpha) {
  require_alpha(alpha, false);
  require_mass(x);
  return -power_sum_minus_one(x, alpha) / (alpha - 1.0);
}

double shannon(const FrequencyVector& fv) {
  if (fv.l1() == 0) throw UndefinedInputError("entropy of an empty stream is undefined");
  const auto x = fv.distribution();
  return shannon(std::span<const double>(x));
}

double renyi(const FrequencyVector& fv, double alpha) {
  if (fv.l1() == 0) throw UndefinedInputError("entropy of an empty stream is undefined");
  const auto x = fv.distribution();
  return renyi(std::span<const double>(x), alpha);
}

double tsallis(const FrequencyVector& fv, double alpha) {
  if (fv.l1() == 0) throw UndefinedInputError("entropy of an empty stream is undefined");
  const auto x = fv.distribution();
  return tsallis(std::span<const double>(x), alpha);
}

double derivative_sum(std::span<const double> x, unsigned order, double point) {
  if (point < -1.0) throw ParameterError("derivative point must be >= -1");
  std::vector<double> terms;
  for (double v : x) {
    if (v > 0.0) {
      const double lx = std::log(v);
      terms.push_back(std::exp((1.0 + point) * lx) * std::pow(lx, static_cast<double>(order)));
    }
  }
  return sorted_sum(terms);
}

DerivativeProbe derivative_sum(const FrequencyVector& fv, unsigned order, double point) {
  if (fv.l1() == 0) throw UndefinedInputError("derivative sums need a nonempty stream");
  const auto x = fv.distribution();
  return DerivativeProbe{order, point, derivative_sum(std::span<const double>(x), order, point)};
}

}  // namespace entsketch
