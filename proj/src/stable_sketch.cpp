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

#include "entsketch/stable_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "entsketch/random_oracle.hpp"

namespace entsketch {

namespace {

constexpr char kMagic[5] = "ESKS";
constexpr char kExactMagic[5] = "ESKX";
// Version 1 carries only the f64 projections; version 2 appends the exact
// accumulator state after them.
constexpr std::uint32_t kProjectionOnlyVersion = 1;
constexpr std::uint32_t kVersion = 2;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
}

void check_rows(std::uint64_t rows) {
  if (rows == 0 || rows % 3 != 0) throw ParameterError("row count must be a positive multiple of 3");
  if (rows > kMaxSketchRows)
    throw ConfigurationError("sketch needs " + std::to_string(rows) + " rows, above the limit of " +
                             std::to_string(kMaxSketchRows));
}

double median_in_place(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

namespace detail {

namespace {

constexpr int kLevelBits = 40;
constexpr int kMaxLevel = 26;

// Level L holds |x| < 2^(40 (L + 1)) in units of 2^(40 (L - 1)).
int level_of(double ax) {
  int level = 0;
  while (level < kMaxLevel && ax >= std::ldexp(1.0, kLevelBits * (level + 1))) ++level;
  return level;
}

int unit_exponent(int level) { return kLevelBits * (level - 1); }

double to_double(i128 v, int exponent) {
  // Split so the conversion is exact up to the final rounding.
  const bool neg = v < 0;
  const u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  const double hi = static_cast<double>(static_cast<std::uint64_t>(m >> 64)) * 0x1p64;
  const double lo = static_cast<double>(static_cast<std::uint64_t>(m));
  const double r = std::ldexp(hi + lo, exponent);
  return neg ? -r : r;
}

i128 quantize(double x, int level) {
  const double scaled = level == 0 ? x * 0x1p40 : std::ldexp(x, -unit_exponent(level));
  if (std::abs(scaled) < 0x1p62) return static_cast<i128>(std::llrint(scaled));
  return static_cast<i128>(std::rint(scaled));
}

double base_to_double(i128 v) {
  if (v >= -(i128{1} << 62) && v <= (i128{1} << 62)) return static_cast<double>(static_cast<std::int64_t>(v)) * 0x1p-40;
  return to_double(v, -kLevelBits);
}

}  // namespace

ProjectionAccumulator::ProjectionAccumulator(std::size_t rows) : base_(rows, 0), values_(rows, 0.0) {}

ProjectionAccumulator ProjectionAccumulator::from_values(const std::vector<double>& values) {
  ProjectionAccumulator acc(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    const double v = values[r];
    if (!std::isfinite(v)) throw IoError("non-finite projection");
    // Serialized values are multiples of 2^-40; below 2^86 they fit the base grid exactly.
    if (std::abs(v) < 0x1p86) {
      acc.base_[r] = quantize(v, 0);
    } else {
      int level = 1;
      while (std::abs(v) >= std::ldexp(1.0, 126 + unit_exponent(level))) ++level;
      acc.high_[r * 32 + level] = quantize(v, level);
    }
    acc.refresh(r);
  }
  return acc;
}

void ProjectionAccumulator::add(std::size_t row, std::int64_t delta, double x) {
  const double ax = std::abs(x);
  if (ax < 0x1p40) {
    base_[row] += quantize(x, 0) * static_cast<i128>(delta);
    if (high_.empty()) {
      values_[row] = base_to_double(base_[row]);
      return;
    }
  } else {
    const int level = level_of(ax);
    high_[row * 32 + level] += quantize(x, level) * static_cast<i128>(delta);
  }
  refresh(row);
}

void ProjectionAccumulator::merge(const ProjectionAccumulator& other) {
  for (std::size_t r = 0; r < base_.size(); ++r) base_[r] += other.base_[r];
  for (const auto& [key, v] : other.high_) high_[key] += v;
  for (std::size_t r = 0; r < base_.size(); ++r) refresh(r);
}

bool ProjectionAccumulator::same_state(const ProjectionAccumulator& other) const {
  if (base_ != other.base_) return false;
  auto nonzero = [](const std::map<std::uint64_t, i128>& m) {
    std::map<std::uint64_t, i128> out;
    for (const auto& [k, v] : m) {
      if (v != 0) out.emplace(k, v);
    }
    return out;
  };
  return nonzero(high_) == nonzero(other.high_);
}

namespace {

void put_i128(std::ostream& out, i128 v) {
  const auto u = static_cast<u128>(v);
  put_u64(out, static_cast<std::uint64_t>(u));
  put_u64(out, static_cast<std::uint64_t>(u >> 64));
}

i128 get_i128(std::istream& in) {
  const u128 lo = get_u64(in);
  const u128 hi = get_u64(in);
  return static_cast<i128>(lo | (hi << 64));
}

}  // namespace

void ProjectionAccumulator::write_state(std::ostream& out) const {
  for (i128 v : base_) put_i128(out, v);
  std::uint64_t nonzero = 0;
  for (const auto& [key, v] : high_) nonzero += v != 0;
  put_u64(out, nonzero);
  for (const auto& [key, v] : high_) {
    if (v == 0) continue;
    put_u64(out, key);
    put_i128(out, v);
  }
}

ProjectionAccumulator ProjectionAccumulator::read_state(std::istream& in, std::size_t rows) {
  ProjectionAccumulator acc(rows);
  for (auto& v : acc.base_) v = get_i128(in);
  const auto count = get_u64(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto key = get_u64(in);
    if (key / 32 >= rows || key % 32 == 0 || static_cast<int>(key % 32) > kMaxLevel)
      throw IoError("corrupt exact sketch state");
    acc.high_[key] = get_i128(in);
  }
  for (std::size_t r = 0; r < rows; ++r) acc.refresh(r);
  return acc;
}

void ProjectionAccumulator::refresh(std::size_t row) {
  double v = 0.0;
  // Highest level first so the result depends only on the integer state.
  auto it = high_.lower_bound(row * 32 + 32);
  while (it != high_.begin()) {
    --it;
    if (it->first < row * 32) break;
    v += to_double(it->second, unit_exponent(static_cast<int>(it->first % 32)));
  }
  values_[row] = v + base_to_double(base_[row]);
}

}  // namespace detail

StableDraw StableDraw::from_uniforms(double u_theta, double u_w) {
  StableDraw d;
  d.theta = std::numbers::pi * (u_theta - 0.5);
  d.sin_theta = std::sin(d.theta);
  d.cos_theta = std::cos(d.theta);
  d.log_cos_theta = std::log(d.cos_theta);
  d.log_w = std::log(-std::log(u_w));
  return d;
}

StableDraw StableDraw::from_oracle(std::uint64_t seed, std::uint64_t row, std::uint64_t index) {
  const auto [u, v] = oracle_uniforms(seed, row, index);
  return from_uniforms(u, v);
}

double StableDraw::variate(double alpha) const {
  const double y = alpha - 1.0;
  if (y == 0.0) return sin_theta / cos_theta;
  // sin(alpha theta) = sin(theta) cos(y theta) + cos(theta) sin(y theta)
  // and cos((1 - alpha) theta) = cos(y theta).
  const double sy = std::sin(y * theta);
  const double cy = std::cos(y * theta);
  const double sin_at = sin_theta * cy + cos_theta * sy;
  const double inv = 1.0 / alpha;
  return sin_at * std::exp(-log_cos_theta * inv - y * inv * (std::log(cy) - log_w));
}

double sample_stable(double alpha, double u, double theta) {
  check_alpha(alpha);
  if (!(u > 0.0 && u < 1.0)) throw ParameterError("u must lie in (0, 1)");
  if (!(std::abs(theta) < std::numbers::pi / 2)) throw ParameterError("theta must lie in (-pi/2, pi/2)");
  StableDraw d;
  d.theta = theta;
  d.sin_theta = std::sin(theta);
  d.cos_theta = std::cos(theta);
  d.log_cos_theta = std::log(d.cos_theta);
  d.log_w = std::log(-std::log(u));
  return d.variate(alpha);
}

double stable_matrix_entry(double alpha, std::uint64_t seed, std::uint64_t row, std::uint64_t index) {
  return StableDraw::from_oracle(seed, row, index).variate(alpha);
}

double geometric_mean_constant(double alpha) {
  check_alpha(alpha);
  const double base = (2.0 / std::numbers::pi) * std::tgamma(alpha / 3.0) * std::tgamma(2.0 / 3.0) *
                      std::sin(std::numbers::pi * alpha / 6.0);
  return base * base * base;
}

double geometric_mean_estimate(std::span<const double, 3> group, double alpha) {
  double log_sum = 0.0;
  for (double y : group) {
    if (y == 0.0) return 0.0;
    log_sum += std::log(std::abs(y));
  }
  return std::exp(alpha / 3.0 * log_sum) / geometric_mean_constant(alpha);
}

std::uint64_t median_blocks(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta))));
}

MomentSizing moment_sizing(double epsilon, double delta, double c_var) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(c_var > 0.0)) throw ParameterError("variance constant must be positive");
  MomentSizing s;
  s.groups_per_block =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(c_var / (epsilon * epsilon) - 1e-9)));
  s.blocks = median_blocks(delta);
  return s;
}

StableSketch::StableSketch(double alpha, std::uint64_t rows, std::uint64_t seed) : alpha_(alpha), seed_(seed) {
  check_alpha(alpha);
  check_rows(rows);
  acc_ = detail::ProjectionAccumulator(rows);
}

StableSketch::StableSketch(double alpha, std::uint64_t seed, const std::vector<double>& projections)
    : alpha_(alpha), seed_(seed) {
  check_alpha(alpha);
  check_rows(projections.size());
  acc_ = detail::ProjectionAccumulator::from_values(projections);
}

StableSketch::StableSketch(double alpha, std::uint64_t seed, detail::ProjectionAccumulator acc)
    : alpha_(alpha), seed_(seed), acc_(std::move(acc)) {}

StableSketch StableSketch::for_accuracy(double alpha, double epsilon, double delta, std::uint64_t seed,
                                        double c_var) {
  return StableSketch(alpha, moment_sizing(epsilon, delta, c_var).rows(), seed);
}

void StableSketch::update(const UpdateEvent& e) { update_groups(e, 0, groups()); }

void StableSketch::update_groups(const UpdateEvent& e, std::uint64_t first_group, std::uint64_t group_count) {
  if (first_group + group_count > groups()) throw ParameterError("group range outside sketch");
  const std::uint64_t end = 3 * (first_group + group_count);
  for (std::uint64_t r = 3 * first_group; r < end; ++r)
    acc_.add(r, e.delta, StableDraw::from_oracle(seed_, r, e.index).variate(alpha_));
}

double StableSketch::group_estimate(std::uint64_t group) const {
  return geometric_mean_estimate(std::span<const double, 3>(acc_.values().data() + 3 * group, 3), alpha_);
}

double StableSketch::mean_estimate(std::uint64_t first_group, std::uint64_t count) const {
  if (count == 0 || first_group + count > groups()) throw ParameterError("group range outside sketch");
  double s = 0.0;
  for (std::uint64_t g = first_group; g < first_group + count; ++g) s += group_estimate(g);
  return s / static_cast<double>(count);
}

double StableSketch::median_of_means(const MomentSizing& sizing) const {
  if (sizing.groups() > groups())
    throw ConfigurationError("sketch has " + std::to_string(groups()) + " groups, estimate needs " +
                             std::to_string(sizing.groups()));
  std::vector<double> means(sizing.blocks);
  for (std::uint64_t b = 0; b < sizing.blocks; ++b)
    means[b] = mean_estimate(b * sizing.groups_per_block, sizing.groups_per_block);
  return median_in_place(means);
}

EstimateReport StableSketch::estimate_moment(double epsilon, double delta, double c_var) const {
  EstimateReport r;
  r.quantity = Quantity::moment(alpha_);
  r.guarantee = Guarantee{GuaranteeKind::multiplicative, epsilon};
  r.value = median_of_means(moment_sizing(epsilon, delta, c_var));
  r.success_prob = 1.0 - delta;
  r.seed = seed_;
  r.space_words_used = space_words();
  return r;
}

void StableSketch::merge(const StableSketch& other) {
  if (other.alpha_ != alpha_ || other.seed_ != seed_ || other.rows() != rows())
    throw ParameterError("cannot merge sketches with different alpha, rows or seed");
  acc_.merge(other.acc_);
}

void StableSketch::serialize(std::ostream& out) const {
  detail::put_magic(out, kMagic);
  detail::put_u32(out, kVersion);
  detail::put_f64(out, alpha_);
  detail::put_u64(out, rows());
  detail::put_u64(out, seed_);
  for (double y : projections()) detail::put_f64(out, y);
  detail::put_magic(out, kExactMagic);
  acc_.write_state(out);
  if (!out) throw IoError("failed to write sketch");
}

StableSketch StableSketch::deserialize(std::istream& in) {
  detail::expect_magic(in, kMagic);
  const auto version = detail::get_u32(in);
  if (version != kVersion && version != kProjectionOnlyVersion)
    throw IoError("unsupported sketch version " + std::to_string(version));
  const double alpha = detail::get_f64(in);
  const auto rows = detail::get_u64(in);
  const auto seed = detail::get_u64(in);
  check_alpha(alpha);
  check_rows(rows);
  std::vector<double> y(rows);
  for (auto& v : y) v = detail::get_f64(in);
  if (version == kProjectionOnlyVersion) return StableSketch(alpha, seed, y);
  detail::expect_magic(in, kExactMagic);
  auto acc = detail::ProjectionAccumulator::read_state(in, rows);
  if (acc.values() != y) throw IoError("sketch projections disagree with its exact state");
  return StableSketch(alpha, seed, std::move(acc));
}

std::string StableSketch::to_bytes() const {
  std::ostringstream out(std::ios::binary);
  serialize(out);
  return std::move(out).str();
}

StableSketch StableSketch::from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return deserialize(in);
}

StableBank::StableBank(std::vector<double> alphas, std::uint64_t rows, std::uint64_t seed)
    : alphas_(std::move(alphas)), rows_(rows), seed_(seed) {
  if (alphas_.empty()) throw ParameterError("a bank needs at least one alpha");
  for (double a : alphas_) check_alpha(a);
  check_rows(rows);
  if (rows * alphas_.size() > 4 * kMaxSketchRows)
    throw ConfigurationError("bank of " + std::to_string(alphas_.size()) + " sketches x " +
                             std::to_string(rows) + " rows exceeds the memory limit");
  acc_.assign(alphas_.size(), detail::ProjectionAccumulator(rows));
}

void StableBank::update(const UpdateEvent& e) { update_groups(e, 0, rows_ / 3); }

void StableBank::update_groups(const UpdateEvent& e, std::uint64_t first_group, std::uint64_t group_count) {
  if (3 * (first_group + group_count) > rows_) throw ParameterError("group range outside bank");
  const std::size_t na = alphas_.size();
  const std::uint64_t end = 3 * (first_group + group_count);
  for (std::uint64_t r = 3 * first_group; r < end; ++r) {
    const StableDraw draw = StableDraw::from_oracle(seed_, r, e.index);
    for (std::size_t a = 0; a < na; ++a) acc_[a].add(r, e.delta, draw.variate(alphas_[a]));
  }
}

std::span<const double> StableBank::projections(std::size_t which) const {
  if (which >= alphas_.size()) throw ParameterError("bank index out of range");
  return std::span<const double>(acc_[which].values());
}

double StableBank::group_estimate(std::size_t which, std::uint64_t group) const {
  const auto p = projections(which);
  if (3 * group + 3 > p.size()) throw ParameterError("group outside bank");
  return geometric_mean_estimate(std::span<const double, 3>(p.data() + 3 * group, 3), alphas_[which]);
}

double StableBank::mean_estimate(std::size_t which, std::uint64_t first_group, std::uint64_t count) const {
  if (count == 0) throw ParameterError("empty group range");
  double s = 0.0;
  for (std::uint64_t g = first_group; g < first_group + count; ++g) s += group_estimate(which, g);
  return s / static_cast<double>(count);
}

StableSketch StableBank::sketch(std::size_t which) const {
  if (which >= alphas_.size()) throw ParameterError("bank index out of range");
  return StableSketch(alphas_[which], seed_, acc_[which]);
}

void StableBank::merge(const StableBank& other) {
  if (other.alphas_ != alphas_ || other.rows_ != rows_ || other.seed_ != seed_)
    throw ParameterError("cannot merge banks with different alphas, rows or seed");
  for (std::size_t a = 0; a < acc_.size(); ++a) acc_[a].merge(other.acc_[a]);
}

}  // namespace entsketch
