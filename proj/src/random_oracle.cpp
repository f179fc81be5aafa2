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

#include "entsketch/random_oracle.hpp"

#include "entsketch/core.hpp"

namespace entsketch {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mod_mersenne61(u128 x) noexcept {
  constexpr std::uint64_t p = PairwiseHash::kPrime;
  std::uint64_t lo = static_cast<std::uint64_t>(x & p);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t r = lo + hi;
  // hi < 2^67 / 2^61 fits; one more fold handles the carry
  r = (r & p) + (r >> 61);
  if (r >= p) r -= p;
  return r;
}

}  // namespace

PairwiseHash::PairwiseHash(std::uint64_t seed, std::uint64_t buckets) : buckets_(buckets) {
  if (buckets == 0) throw ParameterError("hash needs at least one bucket");
  std::uint64_t s = seed;
  do {
    s = mix64(s);
    a_ = s & kPrime;
  } while (a_ == 0 || a_ == kPrime);
  s = mix64(s);
  b_ = s & kPrime;
  if (b_ == kPrime) b_ = 0;
}

std::uint64_t PairwiseHash::operator()(std::uint64_t x) const noexcept {
  const std::uint64_t xr = mod_mersenne61(static_cast<u128>(x));
  const u128 prod = static_cast<u128>(a_) * xr + b_;
  return mod_mersenne61(prod) % buckets_;
}

}  // namespace entsketch
