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

#include "entsketch/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "entsketch/random_oracle.hpp"

namespace entsketch {

namespace {

constexpr std::uint64_t kOrderSalt = 0x4F52;
constexpr std::uint64_t kSignSalt = 0x5347;
constexpr std::uint64_t kChurnSalt = 0x4348;

std::vector<std::int64_t> spread(std::uint64_t count, std::uint64_t slots) {
  std::vector<std::int64_t> out(slots, static_cast<std::int64_t>(count / slots));
  for (std::uint64_t i = 0; i < count % slots; ++i) ++out[i];
  return out;
}

std::vector<std::int64_t> magnitudes(const StreamSpec& spec) {
  switch (spec.family) {
    case StreamFamily::uniform:
      return spread(spec.length, spec.n);
    case StreamFamily::point_mass:
      return {static_cast<std::int64_t>(spec.length)};
    case StreamFamily::zipf: {
      std::vector<double> w(spec.n);
      for (std::uint64_t i = 0; i < spec.n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_s);
      double total = 0.0;
      for (double x : w) total += x;
      std::vector<std::int64_t> out(spec.n);
      std::int64_t used = 0;
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        out[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(spec.length) * w[i] / total));
        used += out[i];
      }
      out[0] += static_cast<std::int64_t>(spec.length) - used;
      return out;
    }
    case StreamFamily::heavy_plus_uniform: {
      const auto heavy = static_cast<std::uint64_t>(std::llround(spec.heavy_weight * static_cast<double>(spec.length)));
      std::vector<std::int64_t> out{static_cast<std::int64_t>(heavy)};
      const auto rest = spread(spec.length - heavy, spec.n - 1);
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
    case StreamFamily::deletion_churn: {
      std::vector<std::int64_t> out = spec.base;
      for (auto& c : out) c = c < 0 ? -c : c;
      return out;
    }
  }
  throw ParameterError("unknown stream family");
}

}  // namespace

std::string_view to_string(StreamFamily family) {
  switch (family) {
    case StreamFamily::uniform:
      return "uniform";
    case StreamFamily::point_mass:
      return "point_mass";
    case StreamFamily::zipf:
      return "zipf";
    case StreamFamily::heavy_plus_uniform:
      return "heavy_plus_uniform";
    case StreamFamily::deletion_churn:
      return "deletion_churn";
  }
  return "?";
}

StreamFamily parse_stream_family(std::string_view text) {
  for (auto f : {StreamFamily::uniform, StreamFamily::point_mass, StreamFamily::zipf,
                 StreamFamily::heavy_plus_uniform, StreamFamily::deletion_churn}) {
    if (text == to_string(f)) return f;
  }
  throw ParameterError("unknown stream family '" + std::string(text) + "'");
}

StreamSpec StreamSpec::uniform(std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  StreamSpec s;
  s.family = StreamFamily::uniform;
  s.n = n;
  s.length = m;
  s.seed = seed;
  return s;
}

StreamSpec StreamSpec::point_mass(std::uint64_t m, std::uint64_t seed) {
  StreamSpec s;
  s.family = StreamFamily::point_mass;
  s.n = 1;
  s.length = m;
  s.seed = seed;
  return s;
}

StreamSpec StreamSpec::zipf(double exponent, std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  StreamSpec s = uniform(n, m, seed);
  s.family = StreamFamily::zipf;
  s.zipf_s = exponent;
  return s;
}

StreamSpec StreamSpec::heavy_plus_uniform(double w_max, std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  StreamSpec s = uniform(n, m, seed);
  s.family = StreamFamily::heavy_plus_uniform;
  s.heavy_weight = w_max;
  return s;
}

StreamSpec StreamSpec::deletion_churn(std::vector<std::int64_t> base, double churn, std::uint64_t seed) {
  StreamSpec s;
  s.family = StreamFamily::deletion_churn;
  s.n = base.size();
  s.base = std::move(base);
  s.churn_fraction = churn;
  s.seed = seed;
  std::uint64_t total = 0;
  for (auto c : s.base) total += static_cast<std::uint64_t>(c < 0 ? -c : c);
  s.length = total;
  return s;
}

void StreamSpec::validate() const {
  switch (family) {
    case StreamFamily::uniform:
    case StreamFamily::zipf:
      if (n == 0) throw ParameterError("n must be positive");
      if (length < n) throw ParameterError("stream length m must be at least n");
      if (family == StreamFamily::zipf && !(zipf_s >= 0.0)) throw ParameterError("zipf exponent must be >= 0");
      break;
    case StreamFamily::point_mass:
      if (length == 0) throw ParameterError("stream length m must be positive");
      break;
    case StreamFamily::heavy_plus_uniform:
      if (n < 2) throw ParameterError("heavy_plus_uniform needs n >= 2");
      if (!(heavy_weight > 0.0 && heavy_weight < 1.0)) throw ParameterError("heavy weight must lie in (0, 1)");
      if (length < n) throw ParameterError("stream length m must be at least n");
      if (static_cast<double>(length) * (1.0 - heavy_weight) < static_cast<double>(n - 1) - 0.5)
        throw ParameterError("stream too short to give every light index a count");
      break;
    case StreamFamily::deletion_churn:
      if (base.empty()) throw ParameterError("deletion_churn needs a base vector");
      if (!(churn_fraction >= 0.0)) throw ParameterError("churn fraction must be >= 0");
      if (model == StreamModel::strict_turnstile) {
        for (auto c : base) {
          if (c < 0) throw ParameterError("strict streams need a nonnegative base vector");
        }
      }
      break;
  }
}

std::uint64_t StreamSpec::universe_size() const { return family == StreamFamily::point_mass ? 1 : n; }

std::vector<std::int64_t> net_counts(const StreamSpec& spec) {
  spec.validate();
  auto counts = magnitudes(spec);
  if (spec.family == StreamFamily::deletion_churn) return spec.base;
  if (spec.model == StreamModel::general_update) {
    const auto sign_seed = derive_seed(spec.seed, kSignSalt);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (oracle_bit(sign_seed, 0, i + 1)) counts[i] = -counts[i];
    }
  }
  return counts;
}

std::vector<UpdateEvent> generate(const StreamSpec& spec) {
  const auto counts = net_counts(spec);
  // Each unit update gets a random key; sorting by key gives the order.
  struct Keyed {
    double key;
    UpdateEvent e;
  };
  std::mt19937_64 rng(derive_seed(spec.seed, kOrderSalt));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Keyed> keyed;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t step = counts[i] < 0 ? -1 : 1;
    for (std::int64_t k = 0; k < counts[i] * step; ++k) keyed.push_back({unit(rng), UpdateEvent{i + 1, step}});
  }
  if (spec.family == StreamFamily::deletion_churn) {
    std::uint64_t total = 0;
    for (auto c : counts) total += static_cast<std::uint64_t>(c < 0 ? -c : c);
    const auto pairs = static_cast<std::uint64_t>(std::ceil(spec.churn_fraction * static_cast<double>(total)));
    std::mt19937_64 churn(derive_seed(spec.seed, kChurnSalt));
    std::uniform_int_distribution<std::uint64_t> pick(1, counts.size());
    for (std::uint64_t p = 0; p < pairs; ++p) {
      double a = unit(churn);
      double b = unit(churn);
      if (a > b) std::swap(a, b);
      const auto index = pick(churn);
      const bool insert_first = spec.model == StreamModel::strict_turnstile || unit(churn) < 0.5;
      keyed.push_back({insert_first ? a : b, UpdateEvent{index, +1}});
      keyed.push_back({insert_first ? b : a, UpdateEvent{index, -1}});
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) { return x.key < y.key; });
  std::vector<UpdateEvent> events;
  events.reserve(keyed.size());
  for (const auto& k : keyed) events.push_back(k.e);
  return events;
}

Stream generate_stream(const StreamSpec& spec) {
  Stream s;
  s.universe_size = spec.universe_size();
  s.model = spec.model;
  s.events = generate(spec);
  return s;
}

std::vector<UpdateEvent> coalesce(std::uint64_t universe_size, std::span<const UpdateEvent> events) {
  const FrequencyVector fv(universe_size, events);
  std::vector<UpdateEvent> out;
  for (std::uint64_t i = 0; i < universe_size; ++i) {
    if (fv.counts()[i] != 0) out.push_back(UpdateEvent{i + 1, fv.counts()[i]});
  }
  return out;
}

TrialSummary run_trials(const StreamSpec& spec, const EntropyRequest& request, std::uint64_t trials,
                        const TrialOptions& options) {
  if (trials == 0) throw ParameterError("trials must be at least 1");
  request.validate();
  const auto n = spec.universe_size();
  if (n > request.universe_size) throw ParameterError("stream universe exceeds the request's n");
  const auto events = coalesce(n, generate(spec));
  const FrequencyVector fv(n, events);
  const double truth = exact_value(fv, request.quantity);

  const auto start = std::chrono::steady_clock::now();
  TrialSummary s;
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (options.time_budget_seconds) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
      if (spent.count() > *options.time_budget_seconds) {
        s.truncated = true;
        break;
      }
    }
    EntropyRequest r = request;
    r.seed = derive_seed(request.seed, t);
    const auto report = estimate_stream(events, r);
    ++s.trials;
    if (report.outcome != Outcome::value) continue;
    const double err = std::abs(report.value - truth);
    abs_sum += err;
    rel_sum += truth != 0.0 ? err / std::abs(truth) : err;
    if (request.guarantee.accepts(report.value, truth)) ++s.within_tolerance;
  }
  if (s.trials > 0) {
    const auto k = static_cast<double>(s.trials);
    s.empirical_rate = static_cast<double>(s.within_tolerance) / k;
    s.mean_abs_error = abs_sum / k;
    s.mean_rel_error = rel_sum / k;
  }
  return s;
}

}  // namespace entsketch
