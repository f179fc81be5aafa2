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

// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "entsketch/entsketch.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParameter = 2;
constexpr int kExitNoHeavy = 3;

// Thrown to unwind to main with an exit code and a message for stderr.
struct Exit {
  int code;
  std::string message;
};

int exit_code(es_status s) {
  switch (s) {
    case ES_OK:
      return kExitOk;
    case ES_ERR_PARAMETER:
    case ES_ERR_CONFIGURATION:
      return kExitParameter;
    case ES_ERR_NO_HEAVY_HITTER:
      return kExitNoHeavy;
    default:
      return kExitFailure;
  }
}

void check(es_status s) {
  if (s != ES_OK) throw Exit{exit_code(s), std::string(es_status_name(s)) + ": " + es_last_error()};
}

struct StreamHandle {
  es_stream* p = nullptr;
  ~StreamHandle() { es_stream_free(p); }
};

struct SketchHandle {
  es_sketch* p = nullptr;
  ~SketchHandle() { es_sketch_free(p); }
};

struct HeavyHandle {
  es_heavy_hitter* p = nullptr;
  ~HeavyHandle() { es_heavy_hitter_free(p); }
};

const std::map<std::string, es_quantity> kQuantities{
    {"shannon", ES_SHANNON}, {"renyi", ES_RENYI}, {"tsallis", ES_TSALLIS},
    {"moment", ES_MOMENT},   {"residual_moment", ES_RESIDUAL_MOMENT},
};
const std::map<std::string, es_guarantee> kGuarantees{{"additive", ES_ADDITIVE},
                                                      {"multiplicative", ES_MULTIPLICATIVE}};
const std::map<std::string, es_model> kModels{{"strict", ES_STRICT_TURNSTILE}, {"general", ES_GENERAL_UPDATE}};
const std::map<std::string, es_family> kFamilies{
    {"uniform", ES_FAMILY_UNIFORM},
    {"point_mass", ES_FAMILY_POINT_MASS},
    {"zipf", ES_FAMILY_ZIPF},
    {"heavy_plus_uniform", ES_FAMILY_HEAVY_PLUS_UNIFORM},
    {"deletion_churn", ES_FAMILY_DELETION_CHURN},
};

struct Options {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  es_model model = ES_STRICT_TURNSTILE;
  double epsilon = 0.1;
  double delta = 0.25;
  double alpha = 1.0;
  es_quantity quantity = ES_SHANNON;
  es_guarantee guarantee = ES_ADDITIVE;
  std::uint64_t seed = 0;
  std::uint64_t trials = 200;
  es_family family = ES_FAMILY_UNIFORM;
  double zipf_s = 1.0;
  double heavy_weight = 0.9;
  double churn = 0.5;
  std::vector<std::int64_t> base;
  bool onepoint = false;
  bool bits = false;
  double budget = 0.0;
  std::string kind = "stable";
  std::string input;
  std::vector<std::string> inputs;
  std::string output;
  bool estimate = false;
};

void add_request_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--quantity", o.quantity, "shannon, renyi, tsallis, moment or residual_moment")
      ->transform(CLI::CheckedTransformer(kQuantities, CLI::ignore_case));
  cmd->add_option("--alpha", o.alpha, "order for Renyi, Tsallis and moments");
  cmd->add_option("--guarantee", o.guarantee, "additive or multiplicative")
      ->transform(CLI::CheckedTransformer(kGuarantees, CLI::ignore_case));
  cmd->add_option("--epsilon", o.epsilon, "accuracy parameter");
  cmd->add_option("--delta", o.delta, "failure probability");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--n", o.n, "universe size (defaults to the stream's)");
  cmd->add_option("--m", o.m, "bound on the stream's L1 mass (defaults to its total movement)");
  cmd->add_flag("--onepoint", o.onepoint, "use the one-point additive Shannon estimator");
  cmd->add_flag("--bits", o.bits, "report entropies in bits");
}

void add_family_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "uniform, point_mass, zipf, heavy_plus_uniform or deletion_churn")
      ->transform(CLI::CheckedTransformer(kFamilies, CLI::ignore_case));
  cmd->add_option("--model", o.model, "strict or general")->transform(CLI::CheckedTransformer(kModels));
  cmd->add_option("--zipf-s", o.zipf_s, "Zipf exponent");
  cmd->add_option("--heavy-weight", o.heavy_weight, "weight of index 1 for heavy_plus_uniform");
  cmd->add_option("--churn", o.churn, "insert/delete pairs per unit of base mass");
  cmd->add_option("--base", o.base, "net vector for deletion_churn")->delimiter(',');
}

es_request make_request(const Options& o) {
  es_request r;
  es_request_init(&r);
  r.quantity = o.quantity;
  r.alpha = o.alpha;
  r.guarantee = o.guarantee;
  r.epsilon = o.epsilon;
  r.delta = o.delta;
  r.n = o.n;
  r.m = o.m;
  r.seed = o.seed;
  r.shannon_onepoint = o.onepoint ? 1 : 0;
  r.base2 = o.bits ? 1 : 0;
  return r;
}

es_stream_spec make_spec(const Options& o, const std::uint64_t n_default) {
  es_stream_spec s;
  es_stream_spec_init(&s);
  s.family = o.family;
  s.n = o.n != 0 ? o.n : n_default;
  s.m = o.m != 0 ? o.m : 100 * s.n;
  s.zipf_s = o.zipf_s;
  s.heavy_weight = o.heavy_weight;
  s.churn_fraction = o.churn;
  s.base = o.base.data();
  s.base_len = o.base.size();
  s.model = o.model;
  s.seed = o.seed;
  return s;
}

std::string report_text(const es_report& r) {
  std::size_t needed = 0;
  es_report_format(&r, nullptr, 0, &needed);
  std::string buf(needed, '\0');
  check(es_report_format(&r, buf.data(), buf.size(), nullptr));
  buf.resize(needed - 1);
  return buf;
}

StreamHandle load_stream(const std::string& path) {
  StreamHandle s;
  check(es_stream_read_file(path.c_str(), &s.p));
  return s;
}

int cmd_generate(const Options& o) {
  StreamHandle s;
  const auto spec = make_spec(o, 1000);
  check(es_stream_generate(&spec, &s.p));
  const std::string out = o.output.empty() ? "/dev/stdout" : o.output;
  check(es_stream_write_file(s.p, out.c_str()));
  return kExitOk;
}

int cmd_exact(const Options& o) {
  const auto s = load_stream(o.input);
  double v = 0.0;
  check(es_exact(s.p, o.quantity, o.alpha, &v));
  std::printf("%.17g\n", v);
  return kExitOk;
}

int cmd_estimate(const Options& o) {
  const auto s = load_stream(o.input);
  es_model model = ES_STRICT_TURNSTILE;
  check(es_stream_info(s.p, nullptr, &model, nullptr, nullptr));
  es_request r = make_request(o);
  r.model = model;
  es_report rep{};
  const es_status st = es_estimate(s.p, &r, &rep);
  if (st == ES_ERR_NO_HEAVY_HITTER) {
    std::cout << report_text(rep);
    std::cerr << "no heavy hitter: the residual moment is undefined for this stream\n";
    return kExitNoHeavy;
  }
  check(st);
  std::cout << report_text(rep);
  return kExitOk;
}

int cmd_trials(const Options& o) {
  const auto spec = make_spec(o, 1000);
  es_request r = make_request(o);
  r.model = o.model;
  r.n = spec.family == ES_FAMILY_DELETION_CHURN ? o.base.size() : spec.family == ES_FAMILY_POINT_MASS ? 1 : spec.n;
  r.m = spec.m;
  es_trial_summary t{};
  check(es_trials(&spec, &r, o.trials, o.budget, &t));
  std::printf("trials=%llu\nwithin_tolerance=%llu\nempirical_rate=%.6f\nmean_abs_error=%.6g\nmean_rel_error=%.6g\n",
              static_cast<unsigned long long>(t.trials), static_cast<unsigned long long>(t.within_tolerance),
              t.empirical_rate, t.mean_abs_error, t.mean_rel_error);
  if (t.truncated) std::printf("truncated=1\n");
  return kExitOk;
}

void print_moment(const es_sketch* sk, const Options& o) {
  es_report rep{};
  check(es_sketch_estimate(sk, o.epsilon, o.delta, &rep));
  std::cout << report_text(rep);
}

void print_heavy(const es_heavy_hitter* hh) {
  std::uint64_t index = 0;
  double residual = 0.0;
  const es_status st = es_heavy_hitter_locate(hh, &index, &residual);
  if (st == ES_ERR_NO_HEAVY_HITTER) throw Exit{kExitNoHeavy, "no heavy hitter"};
  check(st);
  std::printf("heavy_index=%llu\nresidual_l1=%.17g\n", static_cast<unsigned long long>(index), residual);
}

int cmd_sketch(const Options& o) {
  const auto s = load_stream(o.input);
  if (o.kind == "heavy") {
    std::uint64_t n = 0;
    check(es_stream_info(s.p, &n, nullptr, nullptr, nullptr));
    HeavyHandle hh;
    check(es_heavy_hitter_create(o.n != 0 ? o.n : n, o.epsilon, o.seed, 0, &hh.p));
    check(es_heavy_hitter_update_stream(hh.p, s.p));
    if (!o.output.empty()) check(es_heavy_hitter_save(hh.p, o.output.c_str()));
    if (o.estimate) print_heavy(hh.p);
    return kExitOk;
  }
  SketchHandle sk;
  check(es_sketch_for_accuracy(o.alpha, o.epsilon, o.delta, o.seed, &sk.p));
  check(es_sketch_update_stream(sk.p, s.p));
  if (!o.output.empty()) check(es_sketch_save(sk.p, o.output.c_str()));
  if (o.estimate) print_moment(sk.p, o);
  return kExitOk;
}

int cmd_merge(const Options& o) {
  if (o.inputs.size() < 2) throw Exit{kExitParameter, "merge needs at least two sketch files"};
  if (o.kind == "heavy") {
    HeavyHandle acc;
    check(es_heavy_hitter_load(o.inputs[0].c_str(), &acc.p));
    for (std::size_t i = 1; i < o.inputs.size(); ++i) {
      HeavyHandle next;
      check(es_heavy_hitter_load(o.inputs[i].c_str(), &next.p));
      check(es_heavy_hitter_merge(acc.p, next.p));
    }
    if (!o.output.empty()) check(es_heavy_hitter_save(acc.p, o.output.c_str()));
    if (o.estimate) print_heavy(acc.p);
    return kExitOk;
  }
  SketchHandle acc;
  check(es_sketch_load(o.inputs[0].c_str(), &acc.p));
  for (std::size_t i = 1; i < o.inputs.size(); ++i) {
    SketchHandle next;
    check(es_sketch_load(o.inputs[i].c_str(), &next.p));
    check(es_sketch_merge(acc.p, next.p));
  }
  if (!o.output.empty()) check(es_sketch_save(acc.p, o.output.c_str()));
  if (o.estimate) print_moment(acc.p, o);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear sketches for entropy and frequency moments of turnstile streams"};
  app.require_subcommand(1);
  Options o;

  auto* generate = app.add_subcommand("generate", "write a synthetic stream file");
  add_family_flags(generate, o);
  generate->add_option("--n", o.n, "universe size");
  generate->add_option("--m", o.m, "stream length (total unit updates before churn)");
  generate->add_option("--seed", o.seed, "seed");
  generate->add_option("-o,--output", o.output, "output file (default stdout)");

  auto* exact = app.add_subcommand("exact", "exact value of a quantity on a stream file");
  exact->add_option("stream", o.input, "stream file")->required();
  exact->add_option("--quantity", o.quantity)->transform(CLI::CheckedTransformer(kQuantities, CLI::ignore_case));
  exact->add_option("--alpha", o.alpha);

  auto* estimate = app.add_subcommand("estimate", "sketch a stream file and print one report");
  estimate->add_option("stream", o.input, "stream file")->required();
  add_request_flags(estimate, o);

  auto* trials = app.add_subcommand("trials", "Monte-Carlo accuracy summary on a synthetic family");
  add_family_flags(trials, o);
  add_request_flags(trials, o);
  trials->add_option("--trials", o.trials, "number of seeded trials");
  trials->add_option("--budget", o.budget, "stop after this many seconds (0 = no limit)");

  auto* sketch = app.add_subcommand("sketch", "sketch a stream file and save the sketch");
  sketch->add_option("stream", o.input, "stream file")->required();
  sketch->add_option("--kind", o.kind, "stable (moment sketch) or heavy (heavy-hitter sketch)")
      ->check(CLI::IsMember({"stable", "heavy"}));
  sketch->add_option("--alpha", o.alpha, "stable index");
  sketch->add_option("--epsilon", o.epsilon, "accuracy parameter");
  sketch->add_option("--delta", o.delta, "failure probability");
  sketch->add_option("--seed", o.seed, "seed");
  sketch->add_option("--n", o.n, "universe size for heavy-hitter sketches");
  sketch->add_option("-o,--output", o.output, "sketch file");
  sketch->add_flag("--estimate", o.estimate, "print the sketch's estimate");

  auto* merge = app.add_subcommand("merge", "combine sketches built with the same parameters");
  merge->add_option("sketches", o.inputs, "sketch files")->required();
  merge->add_option("--kind", o.kind, "stable or heavy")->check(CLI::IsMember({"stable", "heavy"}));
  merge->add_option("--epsilon", o.epsilon, "accuracy for --estimate");
  merge->add_option("--delta", o.delta, "failure probability for --estimate");
  merge->add_option("-o,--output", o.output, "merged sketch file");
  merge->add_flag("--estimate", o.estimate, "print the merged sketch's estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParameter;
  }

  try {
    if (generate->parsed()) return cmd_generate(o);
    if (exact->parsed()) return cmd_exact(o);
    if (estimate->parsed()) return cmd_estimate(o);
    if (trials->parsed()) return cmd_trials(o);
    if (sketch->parsed()) return cmd_sketch(o);
    if (merge->parsed()) return cmd_merge(o);
  } catch (const Exit& e) {
    std::cerr << "entsketch: " << e.message << '\n';
    return e.code;
  }
  return kExitFailure;
}
