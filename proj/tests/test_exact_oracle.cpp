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
#include <random>
#include <vector>

#include "doctest.h"
#include "entsketch/exact_oracle.hpp"

using namespace entsketch;

namespace {

FrequencyVector uniform_counts(std::size_t n, std::int64_t c) {
  return FrequencyVector::from_counts(std::vector<std::int64_t>(n, c));
}

// Straightforward sums, kept apart from the library's sorted summation.
double naive_shannon(const std::vector<double>& x) {
  double h = 0.0;
  for (double p : x)
    if (p > 0) h -= p * std::log(p);
  return h;
}

double naive_power_sum(const std::vector<double>& x, double a) {
  double s = 0.0;
  for (double p : x)
    if (p > 0) s += std::pow(p, a);
  return s;
}

}  // namespace

TEST_CASE("closed forms on uniform and point-mass vectors") {
  for (std::size_t n : {2u, 7u, 256u, 1000u}) {
    const auto fv = uniform_counts(n, 3);
    const double ln_n = std::log(static_cast<double>(n));
    CHECK(std::abs(shannon(fv) - ln_n) <= 1e-12 * ln_n);
    CHECK(std::abs(renyi(fv, 0.5) - ln_n) <= 1e-12 * ln_n);
    CHECK(std::abs(renyi(fv, 2.0) - ln_n) <= 1e-12 * ln_n);
    const double t2 = 1.0 - 1.0 / static_cast<double>(n);
    CHECK(tsallis(fv, 2.0) == doctest::Approx(t2).epsilon(1e-12));
  }
  const auto point = FrequencyVector::from_counts(std::vector<std::int64_t>{0, 9, 0});
  CHECK(shannon(point) == 0.0);
  CHECK(renyi(point, 0.5) == 0.0);
  CHECK(tsallis(point, 1.5) == 0.0);
}

TEST_CASE("moments and residual moments") {
  const auto fv = FrequencyVector::from_counts(std::vector<std::int64_t>{4, -2, 1});
  CHECK(moment(fv, 1.0) == 7.0);
  CHECK(moment(fv, 2.0) == 21.0);
  CHECK(residual_moment(fv, 2.0) == 5.0);
  CHECK(residual_moment(fv, 1.0) == 3.0);
  CHECK(fv.heaviest_index() == 1);
  CHECK_FALSE(fv.nonnegative());
  CHECK(fv.l1() == 7);
}

TEST_CASE("incremental l1 follows signed updates") {
  FrequencyVector fv(3);
  fv.apply(UpdateEvent{1, 5});
  fv.apply(UpdateEvent{2, -3});
  fv.apply(UpdateEvent{1, -6});
  CHECK(fv.count(1) == -1);
  CHECK(fv.l1() == 4);
  CHECK_THROWS(fv.apply(UpdateEvent{4, 1}));
}

TEST_CASE("entropy limits at alpha near 1 agree with Shannon") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> count(1, 50);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::int64_t> c(30);
    for (auto& v : c) v = count(rng);
    const auto fv = FrequencyVector::from_counts(c);
    const double h = shannon(fv);
    CHECK(renyi(fv, 1.0 + 1e-7) == doctest::Approx(h).epsilon(1e-5));
    CHECK(tsallis(fv, 1.0 - 1e-7) == doctest::Approx(h).epsilon(1e-5));
  }
}

TEST_CASE("library sums match naive sums on random vectors") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> count(0, 1000);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::int64_t> c(100);
    for (auto& v : c) v = count(rng);
    c[0] += 1;
    const auto fv = FrequencyVector::from_counts(c);
    const auto x = fv.distribution();
    CHECK(shannon(fv) == doctest::Approx(naive_shannon(x)).epsilon(1e-12));
    for (double a : {0.25, 0.5, 1.5, 2.0}) {
      const double s = naive_power_sum(x, a);
      CHECK(renyi(fv, a) == doctest::Approx(std::log(s) / (1.0 - a)).epsilon(1e-10));
      CHECK(tsallis(fv, a) == doctest::Approx((1.0 - s) / (a - 1.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Renyi is non-increasing in alpha and bounded by ln n") {
  const auto fv = FrequencyVector::from_counts(std::vector<std::int64_t>{50, 20, 10, 5, 5, 1});
  double prev = renyi(fv, 0.1);
  CHECK(prev <= std::log(6.0) + 1e-12);
  for (double a = 0.2; a <= 2.0; a += 0.1) {
    if (std::abs(a - 1.0) < 1e-9) continue;
    const double r = renyi(fv, a);
    CHECK(r <= prev + 1e-12);
    prev = r;
  }
}

TEST_CASE("derivative sums") {
  const std::vector<double> x{0.5, 0.25, 0.25};
  // G_0(a) is the power sum, G_1(0) is minus the Shannon entropy.
  CHECK(derivative_sum(x, 0, 1.0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(derivative_sum(x, 1, 0.0) == doctest::Approx(-naive_shannon(x)).epsilon(1e-14));
  const double h = 1e-5;
  const double numeric = (derivative_sum(x, 1, 0.3 + h) - derivative_sum(x, 1, 0.3 - h)) / (2 * h);
  CHECK(derivative_sum(x, 2, 0.3) == doctest::Approx(numeric).epsilon(1e-6));
  const auto probe = derivative_sum(FrequencyVector::from_counts(std::vector<std::int64_t>{2, 1, 1}), 1, 0.0);
  CHECK(probe.order == 1);
  CHECK(probe.value == doctest::Approx(-naive_shannon(x)).epsilon(1e-14));
}

TEST_CASE("undefined and invalid inputs") {
  FrequencyVector empty(4);
  CHECK_THROWS_AS(shannon(empty), UndefinedInputError);
  CHECK_THROWS_AS(renyi(empty, 2.0), UndefinedInputError);
  const auto fv = uniform_counts(4, 1);
  CHECK_THROWS_AS(renyi(fv, 1.0), ParameterError);
  CHECK_THROWS_AS(tsallis(fv, 1.0), ParameterError);
  CHECK(empty.heaviest_index() == 0);
}
