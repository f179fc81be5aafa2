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

#include "entsketch/heavy_hitter.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "binary_io.hpp"

namespace entsketch {

namespace {

constexpr char kMagic[5] = "ESHH";
constexpr std::uint32_t kVersion = 1;

std::uint64_t abs64(std::int64_t v) {
  return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
}

std::uint32_t bits_for(std::uint64_t n) {
  // Enough bits for index - 1 in [0, n).
  return n <= 1 ? 1u : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

}  // namespace

std::uint64_t heavy_hitter_bins(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  return static_cast<std::uint64_t>(std::ceil(20.0 / epsilon - 1e-9));
}

HeavyHitterSketch::HeavyHitterSketch(std::uint64_t universe_size, double epsilon, std::uint64_t seed,
                                     std::uint32_t repetitions)
    : n_(universe_size), epsilon_(epsilon), seed_(seed), reps_(repetitions), bins_(heavy_hitter_bins(epsilon)) {
  if (n_ == 0) throw ParameterError("universe size must be positive");
  if (reps_ == 0) throw ParameterError("need at least one repetition");
  hashes_.reserve(reps_);
  for (std::uint32_t r = 0; r < reps_; ++r) hashes_.emplace_back(derive_seed(seed, r), bins_);
  weights_.assign(reps_ * bins_, 0);
  bits_.assign(bits_for(n_), 0);
}

void HeavyHitterSketch::update(const UpdateEvent& e) {
  if (e.index < 1 || e.index > n_) throw ParameterError("event index outside universe");
  for (std::uint32_t r = 0; r < reps_; ++r) weights_[r * bins_ + hashes_[r](e.index)] += e.delta;
  const std::uint64_t code = e.index - 1;
  for (std::size_t b = 0; b < bits_.size(); ++b) {
    if ((code >> b) & 1u) bits_[b] += e.delta;
  }
  total_ += e.delta;
}

std::int64_t HeavyHitterSketch::bin_weight(std::uint32_t rep, std::uint64_t bin) const {
  if (rep >= reps_ || bin >= bins_) throw ParameterError("bin out of range");
  return weights_[rep * bins_ + bin];
}

std::uint64_t HeavyHitterSketch::heaviest_bin(std::uint32_t rep) const {
  if (rep >= reps_) throw ParameterError("repetition out of range");
  std::uint64_t best = 0;
  std::uint64_t best_w = 0;
  for (std::uint64_t b = 0; b < bins_; ++b) {
    const auto w = abs64(weights_[rep * bins_ + b]);
    if (w > best_w) {
      best_w = w;
      best = b;
    }
  }
  return best;
}

std::uint64_t HeavyHitterSketch::mass(std::uint32_t rep) const {
  if (rep >= reps_) throw ParameterError("repetition out of range");
  std::uint64_t m = 0;
  for (std::uint64_t b = 0; b < bins_; ++b) m += abs64(weights_[rep * bins_ + b]);
  return m;
}

bool HeavyHitterSketch::detect(double threshold) const {
  if (mass(0) == 0) throw UndefinedInputError("heavy-hitter detection on an empty stream");
  for (std::uint32_t r = 0; r < reps_; ++r) {
    const double top = static_cast<double>(abs64(weights_[r * bins_ + heaviest_bin(r)]));
    if (top < threshold * static_cast<double>(mass(r))) return false;
  }
  return true;
}

std::uint64_t HeavyHitterSketch::identify() const {
  const double sign = total_ < 0 ? -1.0 : 1.0;
  const double cut = kBitThreshold * sign * static_cast<double>(total_);
  std::uint64_t code = 0;
  for (std::size_t b = 0; b < bits_.size(); ++b) {
    if (sign * static_cast<double>(bits_[b]) >= cut) code |= std::uint64_t{1} << b;
  }
  return code + 1;
}

bool HeavyHitterSketch::certifies(std::uint64_t index, double threshold) const {
  if (index < 1 || index > n_) return false;
  if (!detect(threshold)) return false;
  for (std::uint32_t r = 0; r < reps_; ++r) {
    if (hashes_[r](index) != heaviest_bin(r)) return false;
  }
  return true;
}

void HeavyHitterSketch::merge(const HeavyHitterSketch& other) {
  if (other.n_ != n_ || other.seed_ != seed_ || other.reps_ != reps_ || other.bins_ != bins_)
    throw ParameterError("cannot merge heavy-hitter sketches with different shape or seed");
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += other.weights_[i];
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] += other.bits_[i];
  total_ += other.total_;
}

void HeavyHitterSketch::serialize(std::ostream& out) const {
  detail::put_magic(out, kMagic);
  detail::put_u32(out, kVersion);
  detail::put_u64(out, n_);
  detail::put_f64(out, epsilon_);
  detail::put_u64(out, seed_);
  detail::put_u32(out, reps_);
  for (auto w : weights_) detail::put_i64(out, w);
  for (auto b : bits_) detail::put_i64(out, b);
  detail::put_i64(out, total_);
  if (!out) throw IoError("failed to write heavy-hitter sketch");
}

HeavyHitterSketch HeavyHitterSketch::deserialize(std::istream& in) {
  detail::expect_magic(in, kMagic);
  const auto version = detail::get_u32(in);
  if (version != kVersion) throw IoError("unsupported heavy-hitter version " + std::to_string(version));
  const auto n = detail::get_u64(in);
  const double eps = detail::get_f64(in);
  const auto seed = detail::get_u64(in);
  const auto reps = detail::get_u32(in);
  HeavyHitterSketch s(n, eps, seed, reps);
  for (auto& w : s.weights_) w = detail::get_i64(in);
  for (auto& b : s.bits_) b = detail::get_i64(in);
  s.total_ = detail::get_i64(in);
  return s;
}

std::string HeavyHitterSketch::to_bytes() const {
  std::ostringstream out(std::ios::binary);
  serialize(out);
  return std::move(out).str();
}

HeavyHitterSketch HeavyHitterSketch::from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return deserialize(in);
}

}  // namespace entsketch
