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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "entsketch/exact_oracle.hpp"
#include "entsketch/random_oracle.hpp"
#include "entsketch/stable_sketch.hpp"

using namespace entsketch;

namespace {

// The textbook Chambers-Mallows-Stuck expression, evaluated directly.
double cms_reference(double alpha, double u, double theta) {
  const double w = -std::log(u);
  if (alpha == 1.0) return std::tan(theta);
  return std::sin(alpha * theta) / std::pow(std::cos(theta), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
}

std::vector<UpdateEvent> small_stream() {
  return {{1, 5}, {3, 2}, {7, 9}, {2, 1}, {3, -1}, {9, 4}, {1, -2}};
}

}  // namespace

TEST_CASE("variates match the reference formula and known special cases") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
  for (int rep = 0; rep < 200; ++rep) {
    const double u = unit(rng);
    const double theta = std::numbers::pi * (unit(rng) - 0.5);
    for (double a : {0.25, 0.5, 0.9, 1.0, 1.3, 2.0}) {
      const double ref = cms_reference(a, u, theta);
      CHECK(sample_stable(a, u, theta) == doctest::Approx(ref).epsilon(1e-9));
    }
    // alpha = 2 is Gaussian with variance 2: 2 sin(theta) sqrt(W).
    CHECK(sample_stable(2.0, u, theta) == doctest::Approx(2.0 * std::sin(theta) * std::sqrt(-std::log(u))));
  }
  CHECK_THROWS_AS(sample_stable(0.0, 0.5, 0.1), ParameterError);
  CHECK_THROWS_AS(sample_stable(2.5, 0.5, 0.1), ParameterError);
  CHECK_THROWS_AS(sample_stable(1.0, 1.0, 0.1), ParameterError);
}

TEST_CASE("shared draws give the same variate as a direct draw") {
  for (std::uint64_t row = 0; row < 20; ++row) {
    const auto d = StableDraw::from_oracle(77, row, 5);
    for (double a : {0.5, 1.0, 1.7}) CHECK(d.variate(a) == stable_matrix_entry(a, 77, row, 5));
  }
}

TEST_CASE("geometric mean constant") {
  // Cauchy: E|X|^(1/3) = 1 / cos(pi/6).
  CHECK(geometric_mean_constant(1.0) == doctest::Approx(std::pow(2.0 / std::sqrt(3.0), 3)).epsilon(1e-13));
  // N(0, 2): E|X|^(2/3) = 2^(2/3) Gamma(5/6) / sqrt(pi).
  const double g = std::pow(2.0, 2.0 / 3.0) * std::tgamma(5.0 / 6.0) / std::sqrt(std::numbers::pi);
  CHECK(geometric_mean_constant(2.0) == doctest::Approx(g * g * g).epsilon(1e-13));
  const std::array<double, 3> ones{1.0, -1.0, 1.0};
  CHECK(geometric_mean_estimate(ones, 1.0) == doctest::Approx(1.0 / geometric_mean_constant(1.0)));
  const std::array<double, 3> with_zero{1.0, 0.0, 1.0};
  CHECK(geometric_mean_estimate(with_zero, 1.0) == 0.0);
}

TEST_CASE("sizing") {
  const auto s = moment_sizing(0.1, 0.05);
  CHECK(s.groups_per_block == 3000);
  CHECK(s.blocks == static_cast<std::uint64_t>(std::ceil(8.0 * std::log(20.0))));
  CHECK(s.rows() == 3 * s.groups());
  CHECK(median_blocks(0.5) == 6);
  CHECK_THROWS_AS(moment_sizing(0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(StableSketch(1.0, kMaxSketchRows + 1, 0), ConfigurationError);
}

TEST_CASE("deletions and reordering leave projections bit-identical") {
  StableSketch direct(1.5, 30, 123);
  const FrequencyVector net(9, small_stream());
  for (std::uint64_t i = 1; i <= 9; ++i)
    if (net.count(i) != 0) direct.update(UpdateEvent{i, net.count(i)});

  StableSketch churned(1.5, 30, 123);
  auto events = small_stream();
  std::reverse(events.begin(), events.end());
  for (const auto& e : events) {
    churned.update(UpdateEvent{e.index, 1000});
    churned.update(e);
    churned.update(UpdateEvent{e.index, -1000});
  }
  CHECK(direct.projections() == churned.projections());
}

TEST_CASE("merge equals sketching the concatenation") {
  const auto events = small_stream();
  StableSketch whole(0.7, 12, 9);
  whole.update(events);
  StableSketch left(0.7, 12, 9);
  StableSketch right(0.7, 12, 9);
  for (std::size_t i = 0; i < events.size(); ++i) (i % 2 ? left : right).update(events[i]);
  left.merge(right);
  CHECK(left.projections() == whole.projections());

  CHECK_THROWS_AS(left.merge(StableSketch(0.8, 12, 9)), ParameterError);
  CHECK_THROWS_AS(left.merge(StableSketch(0.7, 15, 9)), ParameterError);
  CHECK_THROWS_AS(left.merge(StableSketch(0.7, 12, 10)), ParameterError);
}

TEST_CASE("serialization round trip preserves bits and later updates") {
  StableSketch s(1.2, 24, 55);
  s.update(small_stream());
  s.update(UpdateEvent{4, 1000000000});
  const auto bytes = s.to_bytes();
  const auto back = StableSketch::from_bytes(bytes);
  CHECK(back.alpha() == s.alpha());
  CHECK(back.seed() == s.seed());
  CHECK(back.projections() == s.projections());

  auto a = s;
  auto b = back;
  a.update(UpdateEvent{2, -7});
  b.update(UpdateEvent{2, -7});
  CHECK(a.projections() == b.projections());

  CHECK(bytes.substr(0, 4) == "ESKS");
  CHECK_THROWS_AS(StableSketch::from_bytes("XXXX" + bytes.substr(4)), IoError);
  CHECK_THROWS_AS(StableSketch::from_bytes(bytes.substr(0, bytes.size() - 3)), IoError);
}

TEST_CASE("bank sketches equal directly built sketches") {
  const std::vector<double> alphas{0.95, 0.99, 1.0};
  StableBank bank(alphas, 18, 4);
  bank.update(small_stream());
  CHECK(bank.space_words() == 54);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    StableSketch direct(alphas[i], 18, 4);
    direct.update(small_stream());
    CHECK(bank.sketch(i).projections() == direct.projections());
    CHECK(bank.group_estimate(i, 2) == direct.group_estimate(2));
    CHECK(bank.mean_estimate(i, 1, 4) == direct.mean_estimate(1, 4));
  }
}

TEST_CASE("moment estimates on a fixed vector") {
  const auto fv = FrequencyVector::from_counts(std::vector<std::int64_t>{10, 4, 3, 1, 1, 1});
  for (double a : {0.5, 1.0, 2.0}) {
    auto s = StableSketch::for_accuracy(a, 0.2, 0.1, 31);
    for (std::uint64_t i = 1; i <= 6; ++i) s.update(UpdateEvent{i, fv.count(i)});
    const auto r = s.estimate_moment(0.2, 0.1);
    CHECK(r.value == doctest::Approx(moment(fv, a)).epsilon(0.2));
    CHECK(r.success_prob == doctest::Approx(0.9));
    CHECK(r.space_words_used == s.rows());
    CHECK_THROWS_AS(s.estimate_moment(0.05, 0.1), ConfigurationError);
  }
}
