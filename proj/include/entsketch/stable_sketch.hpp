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

#ifndef ENTSKETCH_STABLE_SKETCH_HPP_
#define ENTSKETCH_STABLE_SKETCH_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "entsketch/core.hpp"

namespace entsketch {

// Chambers-Mallows-Stuck: a standard symmetric alpha-stable variate from a
// uniform u in (0,1) (through W = -ln u) and theta in (-pi/2, pi/2).
double sample_stable(double alpha, double u, double theta);

// Per-(row, index) randomness, with the alpha-independent pieces
// precomputed so several alphas can share one draw.
struct StableDraw {
  double theta = 0.0;
  double sin_theta = 0.0;
  double cos_theta = 1.0;
  double log_cos_theta = 0.0;
  double log_w = 0.0;

  static StableDraw from_uniforms(double u_theta, double u_w);
  static StableDraw from_oracle(std::uint64_t seed, std::uint64_t row, std::uint64_t index);
  double variate(double alpha) const;
};

// R[row, index] for a sketch with this seed.
double stable_matrix_entry(double alpha, std::uint64_t seed, std::uint64_t row, std::uint64_t index);

// D(alpha) = [(2/pi) Gamma(alpha/3) Gamma(2/3) sin(pi alpha / 6)]^3.
double geometric_mean_constant(double alpha);

// prod |y_j|^(alpha/3) / D(alpha). Zero when any projection is zero.
double geometric_mean_estimate(std::span<const double, 3> group, double alpha);

namespace detail {

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

// Order-independent sums of delta * x per row. Each x is rounded onto a
// fixed-point grid picked by its magnitude alone (2^-40 units below 2^40,
// coarser grids above) and summed in 128-bit integers, so any interleaving
// of updates, deletions and merges that nets to the same vector gives the
// same bits. Exact while the total |delta| stays below 2^46.
class ProjectionAccumulator {
 public:
  explicit ProjectionAccumulator(std::size_t rows = 0);
  static ProjectionAccumulator from_values(const std::vector<double>& values);

  void add(std::size_t row, std::int64_t delta, double x);
  void merge(const ProjectionAccumulator& other);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  bool same_state(const ProjectionAccumulator& other) const;

  // Exact integer state, so a reloaded sketch keeps absorbing updates and
  // merges bit for bit like the original.
  void write_state(std::ostream& out) const;
  static ProjectionAccumulator read_state(std::istream& in, std::size_t rows);

 private:
  void refresh(std::size_t row);

  std::vector<i128> base_;
  std::map<std::uint64_t, i128> high_;  // key = row * 32 + level
  std::vector<double> values_;
};

}  // namespace detail

inline constexpr double kDefaultVarianceConstant = 30.0;
inline constexpr std::uint64_t kMaxSketchRows = std::uint64_t{1} << 23;

// Median-of-means layout: the median over blocks of per-block means.
struct MomentSizing {
  std::uint64_t groups_per_block = 1;
  std::uint64_t blocks = 1;

  std::uint64_t groups() const noexcept { return groups_per_block * blocks; }
  std::uint64_t rows() const noexcept { return 3 * groups(); }
};

// groups_per_block = ceil(c_var / eps^2), blocks = ceil(8 ln(1/delta)).
MomentSizing moment_sizing(double epsilon, double delta, double c_var = kDefaultVarianceConstant);
std::uint64_t median_blocks(double delta);

class StableSketch {
 public:
  StableSketch(double alpha, std::uint64_t rows, std::uint64_t seed);
  static StableSketch for_accuracy(double alpha, double epsilon, double delta, std::uint64_t seed,
                                   double c_var = kDefaultVarianceConstant);
  // Adopts existing projections; used by deserialization.
  StableSketch(double alpha, std::uint64_t seed, const std::vector<double>& projections);

  void update(const UpdateEvent& e);
  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) update(e);
  }
  // Touches only groups [first_group, first_group + group_count).
  void update_groups(const UpdateEvent& e, std::uint64_t first_group, std::uint64_t group_count);

  double alpha() const noexcept { return alpha_; }
  std::uint64_t rows() const noexcept { return acc_.size(); }
  std::uint64_t groups() const noexcept { return acc_.size() / 3; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<double>& projections() const noexcept { return acc_.values(); }
  std::uint64_t space_words() const noexcept { return acc_.size(); }

  double group_estimate(std::uint64_t group) const;
  // Mean of the group estimates in [first_group, first_group + count).
  double mean_estimate(std::uint64_t first_group, std::uint64_t count) const;
  // Median over sizing.blocks block means; needs sizing.groups() groups.
  double median_of_means(const MomentSizing& sizing) const;

  // (1 +- eps) F_alpha with probability 1 - delta. Throws ConfigurationError
  // when the sketch has fewer groups than the request needs.
  EstimateReport estimate_moment(double epsilon, double delta,
                                 double c_var = kDefaultVarianceConstant) const;

  // Throws ParameterError unless alpha, rows and seed all match.
  void merge(const StableSketch& other);

  void serialize(std::ostream& out) const;
  static StableSketch deserialize(std::istream& in);
  std::string to_bytes() const;
  static StableSketch from_bytes(const std::string& bytes);

 private:
  friend class StableBank;
  StableSketch(double alpha, std::uint64_t seed, detail::ProjectionAccumulator acc);

  double alpha_;
  std::uint64_t seed_;
  detail::ProjectionAccumulator acc_;
};

// Several stable sketches over the same rows and seed, one per alpha, fed by
// the same uniforms. Sharing the draws makes the per-alpha estimates move
// together, so ratios between nearby alphas carry far less noise than
// independent sketches would.
class StableBank {
 public:
  StableBank(std::vector<double> alphas, std::uint64_t rows, std::uint64_t seed);

  void update(const UpdateEvent& e);
  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) update(e);
  }
  void update_groups(const UpdateEvent& e, std::uint64_t first_group, std::uint64_t group_count);

  const std::vector<double>& alphas() const noexcept { return alphas_; }
  std::uint64_t rows() const noexcept { return rows_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t space_words() const noexcept { return rows_ * alphas_.size(); }

  // Sketch for alphas()[which]; identical to a StableSketch built directly
  // with the same alpha, rows and seed.
  StableSketch sketch(std::size_t which) const;
  std::span<const double> projections(std::size_t which) const;
  double group_estimate(std::size_t which, std::uint64_t group) const;
  double mean_estimate(std::size_t which, std::uint64_t first_group, std::uint64_t count) const;

  void merge(const StableBank& other);

 private:
  std::vector<double> alphas_;
  std::uint64_t rows_;
  std::uint64_t seed_;
  std::vector<detail::ProjectionAccumulator> acc_;
};

}  // namespace entsketch

#endif  // ENTSKETCH_STABLE_SKETCH_HPP_
