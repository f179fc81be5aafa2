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

#include "entsketch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "entsketch/heavy_hitter.hpp"
#include "entsketch/random_oracle.hpp"
#include "entsketch/residual.hpp"
#include "entsketch/stable_sketch.hpp"

namespace entsketch {

namespace {

constexpr std::uint64_t kBankSalt = 0xB4A7;
constexpr std::uint64_t kHeavySalt = 0x4848;
constexpr std::uint64_t kStandbySalt = 0x5342;
constexpr std::uint64_t kMomentSalt = 0x4D4F;
constexpr std::uint64_t kResidualSalt = 0x5245;
constexpr std::uint64_t kResidualOneSalt = 0x5231;
constexpr std::uint64_t kInstanceSalt = 0x494E;
constexpr std::uint64_t kSideSalt = 0x5344;

bool is_strict(const EntropyRequest& r) { return r.model == StreamModel::strict_turnstile; }

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

EstimateReport base_report(const EntropyRequest& req) {
  EstimateReport r;
  r.quantity = req.quantity;
  r.guarantee = req.guarantee;
  r.success_prob = 0.75;
  r.seed = req.seed;
  r.display_base = req.base;
  return r;
}

void check_entropy_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0)
    throw ParameterError("alpha must lie in (0, 1) or (1, 2]");
}

// A stream's L1 mass seen through the heavy-hitter sketch; exact in the
// strict model.
double strict_l1(const HeavyHitterSketch& hh) { return static_cast<double>(hh.total()); }

void require_nonempty(const HeavyHitterSketch& hh) {
  if (hh.mass(0) == 0) throw UndefinedInputError("entropy of an empty stream is undefined");
}

// Single distinct element: one certified heavy element and no mass outside
// its bin in any repetition.
bool degenerate(const HeavyHitterSketch& hh) {
  const auto heavy = locate_heavy(hh);
  return heavy && heavy->residual_l1 == 0.0;
}

EstimateReport degenerate_report(EstimateReport r) {
  r.value = 0.0;
  r.degenerate = true;
  return r;
}

HeavyHitterSketch make_hh(const EntropyRequest& req, double epsilon, std::uint64_t salt) {
  return HeavyHitterSketch(req.universe_size, std::min(epsilon, 0.5), derive_seed(req.seed, salt));
}

// Heavy element located by the primary sketch or, when its bit decoding
// disagrees with its bins, by the standby sketch.
struct HeavyLookup {
  std::optional<HeavyElement> heavy;
  bool detected = false;
  bool ambiguous = false;
};

HeavyLookup lookup_heavy(const HeavyHitterSketch& primary, const HeavyHitterSketch& standby) {
  HeavyLookup out;
  out.detected = primary.detect();
  if (!out.detected) return out;
  out.heavy = locate_heavy(primary);
  if (!out.heavy) out.heavy = locate_heavy(standby);
  out.ambiguous = !out.heavy.has_value();
  return out;
}

std::vector<double> shannon_alphas(const std::vector<double>& nodes) {
  std::vector<double> alphas;
  alphas.reserve(nodes.size() + 1);
  for (double y : nodes) alphas.push_back(1.0 + y);
  alphas.push_back(1.0);
  return alphas;
}

// Residual moments for every bank alpha via the random halving scheme; used
// for the heavy branch in the general update model.
class BipartitionBank {
 public:
  BipartitionBank(const std::vector<double>& alphas, std::uint64_t trials, std::uint64_t seed)
      : trials_(trials), side_seed_(derive_seed(seed, kSideSalt)), bank_(alphas, 6 * trials, seed) {}

  void update(const UpdateEvent& e) {
    for (std::uint64_t j = 0; j < trials_; ++j) bank_.update_groups(e, 2 * j + side(j, e.index), 1);
  }

  double residual(std::size_t which, std::uint64_t heavy) const {
    double s = 0.0;
    for (std::uint64_t j = 0; j < trials_; ++j) s += 2.0 * bank_.group_estimate(which, 2 * j + 1 - side(j, heavy));
    return s / static_cast<double>(trials_);
  }

  std::uint64_t space_words() const { return bank_.space_words(); }

 private:
  unsigned side(std::uint64_t j, std::uint64_t index) const { return oracle_bit(side_seed_, j, index) ? 1u : 0u; }

  std::uint64_t trials_;
  std::uint64_t side_seed_;
  StableBank bank_;
};

// Node values T(y_i) for one block of a Shannon bank. Ratios use the bank's
// alpha = 1 companion from the same groups, so the shared draws cancel to
// first order; strict streams scale the remaining L^y factor exactly.
std::vector<double> block_node_values(const StableBank& bank, const std::vector<double>& ys, std::uint64_t first,
                                      std::uint64_t count, std::optional<double> exact_l1) {
  const std::size_t companion = ys.size();
  const double f1 = bank.mean_estimate(companion, first, count);
  std::vector<double> values(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    const double fa = bank.mean_estimate(i, first, count);
    const double ratio = exact_l1 ? fa / (f1 * std::pow(*exact_l1, y)) : normalize_general_update(fa, f1, 1.0 + y);
    values[i] = tsallis_node_value(ratio, y);
  }
  return values;
}

// T(y) for a heavy element: the element's share comes from the residual L1
// fraction r, the rest from the residual ratio sum_{j != i} x_j^(1+y) / r^(1+y).
double heavy_node_value(double r, double residual_ratio, double y) {
  const double a = 1.0 + y;
  const double head = -std::expm1(a * std::log1p(-r));  // 1 - (1 - r)^a
  const double tail = residual_ratio * std::exp(a * std::log(r));
  return (head - tail) / y;
}

// Smallest Shannon entropy of a stream that can reach the multiplicative
// no-heavy branch: every x_i < kDetectThreshold, so H >= h(kDetectThreshold)
// with h the binary entropy. A relative guarantee there follows from an
// additive one at epsilon times this floor.
double no_heavy_entropy_floor() {
  const double p = kDetectThreshold;
  return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
}

struct ShannonState {
  InterpolationPlan plan;
  ShannonSizing sizing;
  StableBank bank;
  HeavyHitterSketch hh;
  HeavyHitterSketch standby;

  ShannonState(const EntropyRequest& req, PlanMode mode)
      : plan(build_plan(req.guarantee.epsilon, req.stream_bound, mode)),
        sizing(shannon_sizing(mode == PlanMode::additive ? req.guarantee.epsilon
                                                         : req.guarantee.epsilon * no_heavy_entropy_floor(),
                              req.delta)),
        bank(shannon_alphas(plan.nodes), sizing.rows(), derive_seed(req.seed, kBankSalt)),
        hh(make_hh(req, req.guarantee.epsilon, kHeavySalt)),
        standby(make_hh(req, req.guarantee.epsilon, kStandbySalt)) {}

  void update(std::span<const UpdateEvent> events) {
    for (const auto& e : events) {
      bank.update(e);
      hh.update(e);
      standby.update(e);
    }
  }

  double interpolate_blocks(std::optional<double> exact_l1) const {
    std::vector<double> estimates(sizing.blocks);
    for (std::uint64_t b = 0; b < sizing.blocks; ++b) {
      const auto values =
          block_node_values(bank, plan.nodes, b * sizing.groups_per_block, sizing.groups_per_block, exact_l1);
      estimates[b] = interpolate_at_zero(plan.nodes, values);
    }
    return median_of(std::move(estimates));
  }
};

}  // namespace

double approx_difference_d1() {
  const double ln3 = std::log(3.0);
  return (2.0 + ln3) / ln3;
}

OnePointConfig OnePointConfig::make(double epsilon, std::uint64_t universe_size, std::uint64_t stream_bound) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (universe_size < 3 || stream_bound < 3)
    throw ParameterError("one-point parameters need n >= 3 and m >= 3 so that ln n, ln m exceed 1");
  OnePointConfig c;
  c.epsilon = epsilon;
  const double ln_m = std::log(static_cast<double>(stream_bound));
  const double ln_n = std::log(static_cast<double>(universe_size));
  c.mu = epsilon / (4.0 * ln_m);
  c.nu = epsilon / (4.0 * ln_n * ln_m);
  c.alpha_star = 1.0 + c.mu / (16.0 * std::log(1.0 / c.mu));
  c.beta_star = 1.0 + c.nu / (16.0 * std::log(1.0 / c.nu));
  c.y0 = c.beta_star - 1.0;
  c.moment_precision = epsilon * c.y0;
  return c;
}

double OnePointConfig::xi(double alpha, double shannon_entropy) { return 4.0 * (alpha - 1.0) * shannon_entropy; }

double OnePointConfig::error_bound(double xi, std::uint64_t universe_size) {
  if (xi <= 0.0) return 0.0;
  return 2.0 * (xi * std::log(static_cast<double>(universe_size)) + xi * std::log(1.0 / xi));
}

void EntropyRequest::validate() const {
  if (universe_size == 0) throw ParameterError("universe size n must be positive");
  if (stream_bound < 4) throw ParameterError("stream bound m must be at least 4");
  if (!(guarantee.epsilon > 0.0 && guarantee.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  switch (quantity.kind) {
    case QuantityKind::shannon:
      break;
    case QuantityKind::renyi:
    case QuantityKind::tsallis:
      check_entropy_alpha(quantity.alpha);
      break;
    case QuantityKind::moment:
    case QuantityKind::residual_moment:
      if (!(quantity.alpha > 0.0 && quantity.alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
      break;
  }
}

ShannonSizing shannon_sizing(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  ShannonSizing s;
  s.groups_per_block = static_cast<std::uint64_t>(std::ceil(kShannonGroupConstant / (epsilon * epsilon) - 1e-9));
  s.blocks = median_blocks(std::min(delta, 0.25));
  if (s.blocks % 2 == 0) ++s.blocks;
  return s;
}

double normalize_general_update(double f_alpha, double f1, double alpha) {
  if (!(f1 > 0.0)) throw UndefinedInputError("normalizing by a non-positive L1 estimate");
  return f_alpha / std::pow(f1, alpha);
}

double renyi_from_moments(double f_alpha, double l1, double alpha) {
  if (!(f_alpha > 0.0)) throw UndefinedInputError("moment estimate must be positive");
  return std::log(normalize_general_update(f_alpha, l1, alpha)) / (1.0 - alpha);
}

double tsallis_from_moments(double f_alpha, double l1, double alpha) {
  return (1.0 - normalize_general_update(f_alpha, l1, alpha)) / (alpha - 1.0);
}

double shannon_from_onepoint(double f_beta, double l1, double y0) {
  return -std::log(normalize_general_update(f_beta, l1, 1.0 + y0)) / y0;
}

double tsallis_node_value(double ratio, double y) { return (1.0 - ratio) / y; }

double shannon_multipoint_exact(const FrequencyVector& fv, const InterpolationPlan& plan) {
  const auto x = fv.distribution();
  std::vector<double> values;
  values.reserve(plan.nodes.size());
  for (double y : plan.nodes) values.push_back(tsallis(std::span<const double>(x), 1.0 + y));
  return interpolate_at_zero(plan.nodes, values);
}

double shannon_onepoint_exact(const FrequencyVector& fv, const OnePointConfig& config) {
  return renyi(fv, config.beta_star);
}

EstimateReport shannon_multipoint_additive(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  ShannonState st(req, PlanMode::additive);
  st.update(events);
  EstimateReport r = base_report(req);
  r.space_words_used = st.bank.space_words() + st.hh.space_words();
  require_nonempty(st.hh);
  if (degenerate(st.hh)) return degenerate_report(r);
  std::optional<double> l1;
  if (is_strict(req)) l1 = strict_l1(st.hh);
  r.value = st.interpolate_blocks(l1);
  return r;
}

EstimateReport shannon_onepoint_additive(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  const auto cfg = OnePointConfig::make(req.guarantee.epsilon, req.universe_size, req.stream_bound);
  const auto sizing = shannon_sizing(req.guarantee.epsilon, req.delta);
  StableBank bank({cfg.beta_star, 1.0}, sizing.rows(), derive_seed(req.seed, kBankSalt));
  HeavyHitterSketch hh = make_hh(req, req.guarantee.epsilon, kHeavySalt);
  for (const auto& e : events) {
    bank.update(e);
    hh.update(e);
  }
  EstimateReport r = base_report(req);
  r.space_words_used = bank.space_words() + hh.space_words();
  require_nonempty(hh);
  if (degenerate(hh)) return degenerate_report(r);
  std::vector<double> estimates(sizing.blocks);
  for (std::uint64_t b = 0; b < sizing.blocks; ++b) {
    const auto first = b * sizing.groups_per_block;
    const double fb = bank.mean_estimate(0, first, sizing.groups_per_block);
    const double f1 = bank.mean_estimate(1, first, sizing.groups_per_block);
    const double ratio = is_strict(req) ? fb / (f1 * std::pow(strict_l1(hh), cfg.y0))
                                        : normalize_general_update(fb, f1, cfg.beta_star);
    estimates[b] = -std::log(ratio) / cfg.y0;
  }
  r.value = median_of(std::move(estimates));
  return r;
}

EstimateReport shannon_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  ShannonState st(req, PlanMode::multiplicative);
  std::optional<BipartitionBank> halves;
  if (!is_strict(req))
    halves.emplace(st.bank.alphas(), bipartition_trials(req.guarantee.epsilon, req.stream_bound),
                   derive_seed(req.seed, kResidualSalt));
  st.update(events);
  if (halves) {
    for (const auto& e : events) halves->update(e);
  }
  EstimateReport r = base_report(req);
  r.space_words_used = st.bank.space_words() + st.hh.space_words() + st.standby.space_words() +
                       (halves ? halves->space_words() : 0);
  require_nonempty(st.hh);
  if (degenerate(st.hh)) return degenerate_report(r);

  const std::optional<double> l1 = is_strict(req) ? std::optional<double>(strict_l1(st.hh)) : std::nullopt;
  const auto lookup = lookup_heavy(st.hh, st.standby);
  r.ambiguous = lookup.ambiguous;
  if (lookup.heavy) {
    const auto& plan = st.plan;
    const std::size_t companion = plan.nodes.size();
    if (l1) {
      const double r_frac = lookup.heavy->residual_l1 / *l1;
      if (r_frac > 0.0 && 1.0 - r_frac >= kHeavyFloor) {
        // Delete the heavy element's estimated count from a copy of the bank;
        // what remains sketches the residual vector up to the L1 error.
        StableBank trimmed = st.bank;
        const auto d = deletion_count(st.hh.total(), lookup.heavy->residual_l1);
        trimmed.update(UpdateEvent{lookup.heavy->index, -d});
        std::vector<double> estimates(st.sizing.blocks);
        for (std::uint64_t b = 0; b < st.sizing.blocks; ++b) {
          const auto first = b * st.sizing.groups_per_block;
          const auto count = st.sizing.groups_per_block;
          const double f1 = trimmed.mean_estimate(companion, first, count);
          std::vector<double> values(plan.nodes.size());
          for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
            const double y = plan.nodes[i];
            const double ratio = normalize_general_update(trimmed.mean_estimate(i, first, count), f1, 1.0 + y);
            values[i] = heavy_node_value(r_frac, ratio, y);
          }
          estimates[b] = interpolate_at_zero(plan.nodes, values);
        }
        r.value = median_of(std::move(estimates));
        r.heavy_path = true;
        return r;
      }
    } else {
      std::vector<double> totals(st.sizing.blocks);
      for (std::uint64_t b = 0; b < st.sizing.blocks; ++b)
        totals[b] = st.bank.mean_estimate(companion, b * st.sizing.groups_per_block, st.sizing.groups_per_block);
      const double total = median_of(std::move(totals));
      const double res1 = halves->residual(companion, lookup.heavy->index);
      const double r_frac = res1 / total;
      if (r_frac > 0.0 && 1.0 - r_frac >= kHeavyFloor) {
        std::vector<double> values(plan.nodes.size());
        for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
          const double y = plan.nodes[i];
          const double ratio = normalize_general_update(halves->residual(i, lookup.heavy->index), res1, 1.0 + y);
          values[i] = heavy_node_value(r_frac, ratio, y);
        }
        r.value = interpolate_at_zero(plan.nodes, values);
        r.heavy_path = true;
        return r;
      }
    }
  }
  r.value = st.interpolate_blocks(l1);
  return r;
}

namespace {

// F_alpha (and F_1 in the general model) sketched at one precision; the
// no-heavy and additive paths of the Renyi and Tsallis estimators.
struct NormalizedMoment {
  double alpha;
  MomentSizing sizing;
  StableSketch fa;
  std::optional<StableSketch> f1;

  NormalizedMoment(const EntropyRequest& req, double alpha_, double precision)
      : alpha(alpha_),
        sizing(instance_sizing(precision, 0.25)),
        fa(alpha_, sizing.rows(), derive_seed(req.seed, kMomentSalt)) {
    if (!is_strict(req)) f1.emplace(1.0, sizing.rows(), derive_seed(req.seed, kMomentSalt));
  }

  void update(const UpdateEvent& e) {
    fa.update(e);
    if (f1) f1->update(e);
  }

  std::uint64_t space_words() const { return fa.space_words() + (f1 ? f1->space_words() : 0); }

  // Estimate of sum x_i^alpha.
  double power_sum(const HeavyHitterSketch& hh) const {
    const double l1 = f1 ? f1->median_of_means(sizing) : strict_l1(hh);
    return normalize_general_update(fa.median_of_means(sizing), l1, alpha);
  }
};

double additive_renyi_precision(double epsilon, double alpha) { return epsilon * std::abs(1.0 - alpha); }

double additive_tsallis_precision(const EntropyRequest& req) {
  const double a = req.quantity.alpha;
  const double eps = req.guarantee.epsilon;
  if (a < 1.0) return (1.0 - a) * eps * std::pow(static_cast<double>(req.universe_size), a - 1.0);
  return (a - 1.0) * eps;
}

EstimateReport additive_moment_entropy(std::span<const UpdateEvent> events, const EntropyRequest& req,
                                       double precision, bool renyi_value) {
  NormalizedMoment nm(req, req.quantity.alpha, std::min(precision, 0.5));
  HeavyHitterSketch hh = make_hh(req, 0.1, kHeavySalt);
  for (const auto& e : events) {
    nm.update(e);
    hh.update(e);
  }
  EstimateReport r = base_report(req);
  r.space_words_used = nm.space_words() + hh.space_words();
  require_nonempty(hh);
  if (degenerate(hh)) return degenerate_report(r);
  const double s = nm.power_sum(hh);
  const double a = req.quantity.alpha;
  r.value = renyi_value ? std::log(s) / (1.0 - a) : (1.0 - s) / (a - 1.0);
  return r;
}

// Residual F_1 and F_alpha for the heavy branch, strict or general.
struct ResidualPair {
  double piece_precision;
  std::optional<ResidualBucketSketch> strict_alpha;
  std::optional<BipartitionResidualSketch> general_alpha;
  std::optional<BipartitionResidualSketch> general_one;

  ResidualPair(const EntropyRequest& req, double alpha, double precision) : piece_precision(precision) {
    const double p = std::min(precision, 0.5);
    if (is_strict(req)) {
      strict_alpha.emplace(req.universe_size, alpha, p, derive_seed(req.seed, kResidualSalt));
    } else {
      general_alpha.emplace(req.universe_size, req.stream_bound, alpha, p, derive_seed(req.seed, kResidualSalt));
      general_one.emplace(req.universe_size, req.stream_bound, 1.0, p, derive_seed(req.seed, kResidualOneSalt));
    }
  }

  void update(const UpdateEvent& e) {
    if (strict_alpha) strict_alpha->update(e);
    if (general_alpha) general_alpha->update(e);
    if (general_one) general_one->update(e);
  }

  std::uint64_t space_words() const {
    std::uint64_t w = 0;
    if (strict_alpha) w += strict_alpha->space_words();
    if (general_alpha) w += general_alpha->space_words();
    if (general_one) w += general_one->space_words();
    return w;
  }
};

// 1 - sum x_i^alpha from a heavy element's residual pieces; nullopt when a
// residual sketch reports no heavy element.
std::optional<double> heavy_difference(const ResidualPair& rp, const HeavyElement& heavy, double l1,
                                       double alpha, bool strict) {
  double res1 = heavy.residual_l1;
  double resa = 0.0;
  if (strict) {
    const auto rep = rp.strict_alpha->estimate();
    if (rep.outcome == Outcome::no_heavy_hitter) return std::nullopt;
    resa = rep.value;
  } else {
    const auto ra = rp.general_alpha->estimate();
    const auto r1 = rp.general_one->estimate();
    if (ra.outcome == Outcome::no_heavy_hitter || r1.outcome == Outcome::no_heavy_hitter) return std::nullopt;
    resa = ra.value;
    res1 = r1.value;
  }
  const double r = std::clamp(res1 / l1, 0.0, 1.0);
  const double head = -std::expm1(alpha * std::log1p(-r));  // 1 - (1 - r)^alpha
  const double tail = resa / std::pow(l1, alpha);
  return head - tail;
}

enum class MultKind { tsallis, renyi };

EstimateReport multiplicative_moment_entropy(std::span<const UpdateEvent> events, const EntropyRequest& req,
                                             MultKind kind) {
  const double a = req.quantity.alpha;
  const double eps = req.guarantee.epsilon;
  const double gap = std::abs(1.0 - a);
  const double d = a < 1.0 ? approx_difference_d1() : kApproxDifferenceD2;
  // Precision demanded of |1 - sum x^a| in the heavy branch.
  const double diff_eps = kind == MultKind::renyi ? eps / kLogApproxRatio : eps;
  const double piece = gap * diff_eps / d;
  const double l1_piece = piece * 2.0 / 3.0;
  const double no_heavy_precision = kind == MultKind::tsallis
                                        ? 0.5 * gap * kLargeDifferenceC * eps
                                        : additive_renyi_precision(std::log(6.0 / 5.0) * eps, a);

  NormalizedMoment nm(req, a, std::min(no_heavy_precision, 0.5));
  HeavyHitterSketch hh = make_hh(req, l1_piece, kHeavySalt);
  HeavyHitterSketch standby = make_hh(req, l1_piece, kStandbySalt);
  ResidualPair rp(req, a, piece);
  std::optional<StableSketch> f1_general;
  if (!is_strict(req)) f1_general.emplace(1.0, instance_sizing(std::min(piece, 0.5), 0.25).rows(),
                                          derive_seed(req.seed, kResidualOneSalt ^ kMomentSalt));
  for (const auto& e : events) {
    nm.update(e);
    hh.update(e);
    standby.update(e);
    rp.update(e);
    if (f1_general) f1_general->update(e);
  }
  EstimateReport r = base_report(req);
  r.space_words_used = nm.space_words() + hh.space_words() + standby.space_words() + rp.space_words() +
                       (f1_general ? f1_general->space_words() : 0);
  require_nonempty(hh);
  if (degenerate(hh)) return degenerate_report(r);

  const auto lookup = lookup_heavy(hh, standby);
  r.ambiguous = lookup.ambiguous;
  if (lookup.heavy) {
    const double l1 = f1_general ? f1_general->median_of_means(instance_sizing(std::min(piece, 0.5), 0.25))
                                 : strict_l1(hh);
    const double x_hat = 1.0 - lookup.heavy->residual_l1 / l1;
    if (!is_strict(req) || x_hat >= kHeavyFloor) {
      const auto diff = heavy_difference(rp, *lookup.heavy, l1, a, is_strict(req));
      if (diff) {
        r.heavy_path = true;
        if (kind == MultKind::tsallis) {
          r.value = *diff / (a - 1.0);
        } else {
          const double t = std::max(1.0 - *diff, std::numeric_limits<double>::min());
          r.value = std::log(t) / (1.0 - a);
        }
        return r;
      }
      r.ambiguous = true;
    }
  }
  const double s = nm.power_sum(hh);
  r.value = kind == MultKind::tsallis ? (1.0 - s) / (a - 1.0) : std::log(s) / (1.0 - a);
  return r;
}

}  // namespace

EstimateReport renyi_additive(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.quantity.kind != QuantityKind::renyi) throw ParameterError("request is not for Renyi entropy");
  return additive_moment_entropy(events, req, additive_renyi_precision(req.guarantee.epsilon, req.quantity.alpha),
                                 true);
}

EstimateReport tsallis_additive(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.quantity.kind != QuantityKind::tsallis) throw ParameterError("request is not for Tsallis entropy");
  return additive_moment_entropy(events, req, additive_tsallis_precision(req), false);
}

EstimateReport tsallis_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.quantity.kind != QuantityKind::tsallis) throw ParameterError("request is not for Tsallis entropy");
  return multiplicative_moment_entropy(events, req, MultKind::tsallis);
}

EstimateReport renyi_multiplicative(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.quantity.kind != QuantityKind::renyi) throw ParameterError("request is not for Renyi entropy");
  return multiplicative_moment_entropy(events, req, MultKind::renyi);
}

EstimateReport moment_estimate(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.guarantee.kind != GuaranteeKind::multiplicative)
    throw ParameterError("frequency moments are estimated with a multiplicative guarantee");
  auto sketch = StableSketch::for_accuracy(req.quantity.alpha, req.guarantee.epsilon, req.delta,
                                           derive_seed(req.seed, kMomentSalt));
  sketch.update(events);
  EstimateReport r = sketch.estimate_moment(req.guarantee.epsilon, req.delta);
  r.seed = req.seed;
  r.display_base = req.base;
  return r;
}

EstimateReport residual_estimate(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  if (req.guarantee.kind != GuaranteeKind::multiplicative)
    throw ParameterError("residual moments are estimated with a multiplicative guarantee");
  EstimateReport r;
  if (is_strict(req)) {
    ResidualBucketSketch s(req.universe_size, req.quantity.alpha, req.guarantee.epsilon, req.seed, req.delta);
    s.update(events);
    r = s.estimate();
  } else {
    BipartitionResidualSketch s(req.universe_size, req.stream_bound, req.quantity.alpha, req.guarantee.epsilon,
                                req.seed);
    s.update(events);
    r = s.estimate();
  }
  r.display_base = req.base;
  return r;
}

namespace {

EstimateReport estimate_once(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  const bool additive = req.guarantee.kind == GuaranteeKind::additive;
  switch (req.quantity.kind) {
    case QuantityKind::shannon:
      if (!additive) return shannon_multiplicative(events, req);
      return req.shannon_method == ShannonMethod::onepoint ? shannon_onepoint_additive(events, req)
                                                           : shannon_multipoint_additive(events, req);
    case QuantityKind::renyi:
      return additive ? renyi_additive(events, req) : renyi_multiplicative(events, req);
    case QuantityKind::tsallis:
      return additive ? tsallis_additive(events, req) : tsallis_multiplicative(events, req);
    case QuantityKind::moment:
      return moment_estimate(events, req);
    case QuantityKind::residual_moment:
      return residual_estimate(events, req);
  }
  throw ParameterError("unknown quantity");
}

}  // namespace

EstimateReport estimate_stream(std::span<const UpdateEvent> events, const EntropyRequest& req) {
  req.validate();
  const bool boosted = req.delta < 0.25 && (req.quantity.kind == QuantityKind::renyi ||
                                            req.quantity.kind == QuantityKind::tsallis);
  if (!boosted) return estimate_once(events, req);
  const auto instances = median_blocks(req.delta);
  std::vector<EstimateReport> reports;
  reports.reserve(instances);
  EntropyRequest sub = req;
  sub.delta = 0.25;
  for (std::uint64_t i = 0; i < instances; ++i) {
    sub.seed = derive_seed(req.seed, kInstanceSalt + i);
    reports.push_back(estimate_once(events, sub));
  }
  std::vector<double> values;
  std::uint64_t words = 0;
  for (const auto& rep : reports) {
    values.push_back(rep.value);
    words += rep.space_words_used;
  }
  const double med = median_of(values);
  auto best = std::min_element(reports.begin(), reports.end(), [med](const auto& x, const auto& y) {
    return std::abs(x.value - med) < std::abs(y.value - med);
  });
  EstimateReport r = *best;
  r.value = med;
  r.seed = req.seed;
  r.success_prob = 1.0 - req.delta;
  r.space_words_used = words;
  return r;
}

double exact_value(const FrequencyVector& fv, const Quantity& q) {
  switch (q.kind) {
    case QuantityKind::shannon:
      return shannon(fv);
    case QuantityKind::renyi:
      return renyi(fv, q.alpha);
    case QuantityKind::tsallis:
      return tsallis(fv, q.alpha);
    case QuantityKind::moment:
      return moment(fv, q.alpha);
    case QuantityKind::residual_moment:
      return residual_moment(fv, q.alpha);
  }
  throw ParameterError("unknown quantity");
}

}  // namespace entsketch
