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

#include "entsketch/entsketch.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "entsketch/core.hpp"
#include "entsketch/estimators.hpp"
#include "entsketch/exact_oracle.hpp"
#include "entsketch/harness.hpp"
#include "entsketch/heavy_hitter.hpp"
#include "entsketch/residual.hpp"
#include "entsketch/stable_sketch.hpp"

// Whole-stream entry points sketch the net vector, one event per nonzero
// index. Updates are quantized before they are scaled by their integer
// delta, so this matches replaying the events one by one bit for bit.
struct es_stream {
  entsketch::Stream stream;
};

struct es_sketch {
  entsketch::StableSketch sketch;
};

struct es_heavy_hitter {
  entsketch::HeavyHitterSketch hh;
};

namespace {

using namespace entsketch;

thread_local std::string g_last_error;

es_status fail(es_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

es_status from_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::parameter:
      return ES_ERR_PARAMETER;
    case ErrorCode::parse:
      return ES_ERR_PARSE;
    case ErrorCode::configuration:
      return ES_ERR_CONFIGURATION;
    case ErrorCode::undefined_input:
      return ES_ERR_UNDEFINED_INPUT;
    case ErrorCode::io:
      return ES_ERR_IO;
    case ErrorCode::internal:
      return ES_ERR_INTERNAL;
  }
  return ES_ERR_INTERNAL;
}

template <typename F>
es_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ES_ERR_CONFIGURATION, "out of memory");
  } catch (const std::exception& e) {
    return fail(ES_ERR_INTERNAL, e.what());
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ParameterError(std::string(what) + " must not be null");
}

StreamModel to_model(es_model m) {
  switch (m) {
    case ES_STRICT_TURNSTILE:
      return StreamModel::strict_turnstile;
    case ES_GENERAL_UPDATE:
      return StreamModel::general_update;
  }
  throw ParameterError("unknown stream model");
}

es_model from_model(StreamModel m) {
  return m == StreamModel::strict_turnstile ? ES_STRICT_TURNSTILE : ES_GENERAL_UPDATE;
}

Quantity to_quantity(es_quantity q, double alpha) {
  switch (q) {
    case ES_SHANNON:
      return Quantity::shannon();
    case ES_RENYI:
      return Quantity::renyi(alpha);
    case ES_TSALLIS:
      return Quantity::tsallis(alpha);
    case ES_MOMENT:
      return Quantity::moment(alpha);
    case ES_RESIDUAL_MOMENT:
      return Quantity::residual_moment(alpha);
  }
  throw ParameterError("unknown quantity");
}

es_quantity from_quantity(QuantityKind k) {
  switch (k) {
    case QuantityKind::shannon:
      return ES_SHANNON;
    case QuantityKind::renyi:
      return ES_RENYI;
    case QuantityKind::tsallis:
      return ES_TSALLIS;
    case QuantityKind::moment:
      return ES_MOMENT;
    case QuantityKind::residual_moment:
      return ES_RESIDUAL_MOMENT;
  }
  return ES_SHANNON;
}

GuaranteeKind to_guarantee(es_guarantee g) {
  switch (g) {
    case ES_ADDITIVE:
      return GuaranteeKind::additive;
    case ES_MULTIPLICATIVE:
      return GuaranteeKind::multiplicative;
  }
  throw ParameterError("unknown guarantee");
}

EntropyRequest to_request(const es_request& r, std::uint64_t default_n, std::uint64_t default_m) {
  EntropyRequest out;
  out.quantity = to_quantity(r.quantity, r.alpha);
  out.guarantee = Guarantee{to_guarantee(r.guarantee), r.epsilon};
  out.model = to_model(r.model);
  out.universe_size = r.n != 0 ? r.n : default_n;
  out.stream_bound = r.m != 0 ? r.m : std::max<std::uint64_t>(default_m, 4);
  out.delta = r.delta;
  out.seed = r.seed;
  out.shannon_method = r.shannon_onepoint ? ShannonMethod::onepoint : ShannonMethod::multipoint;
  out.base = r.base2 ? LogBase::two : LogBase::natural;
  return out;
}

EstimateReport to_cpp_report(const es_report& r) {
  EstimateReport out;
  out.value = r.value;
  out.quantity = to_quantity(r.quantity, r.alpha);
  out.guarantee = Guarantee{to_guarantee(r.guarantee), r.epsilon};
  out.success_prob = r.success_prob;
  out.seed = r.seed;
  out.space_words_used = r.space_words_used;
  out.outcome = r.no_heavy_hitter ? Outcome::no_heavy_hitter : Outcome::value;
  out.degenerate = r.degenerate != 0;
  out.ambiguous = r.ambiguous != 0;
  out.heavy_path = r.heavy_path != 0;
  out.display_base = r.base2 ? LogBase::two : LogBase::natural;
  return out;
}

es_report from_cpp_report(const EstimateReport& r) {
  es_report out{};
  out.value = r.value;
  out.display_value = r.display_value();
  out.quantity = from_quantity(r.quantity.kind);
  out.alpha = r.quantity.alpha;
  out.guarantee = r.guarantee.kind == GuaranteeKind::additive ? ES_ADDITIVE : ES_MULTIPLICATIVE;
  out.epsilon = r.guarantee.epsilon;
  out.success_prob = r.success_prob;
  out.seed = r.seed;
  out.space_words_used = r.space_words_used;
  out.no_heavy_hitter = r.outcome == Outcome::no_heavy_hitter;
  out.degenerate = r.degenerate;
  out.ambiguous = r.ambiguous;
  out.heavy_path = r.heavy_path;
  out.base2 = r.display_base == LogBase::two;
  return out;
}

StreamSpec to_spec(const es_stream_spec& s) {
  StreamSpec out;
  switch (s.family) {
    case ES_FAMILY_UNIFORM:
      out = StreamSpec::uniform(s.n, s.m, s.seed);
      break;
    case ES_FAMILY_POINT_MASS:
      out = StreamSpec::point_mass(s.m, s.seed);
      break;
    case ES_FAMILY_ZIPF:
      out = StreamSpec::zipf(s.zipf_s, s.n, s.m, s.seed);
      break;
    case ES_FAMILY_HEAVY_PLUS_UNIFORM:
      out = StreamSpec::heavy_plus_uniform(s.heavy_weight, s.n, s.m, s.seed);
      break;
    case ES_FAMILY_DELETION_CHURN: {
      if (s.base == nullptr || s.base_len == 0) throw ParameterError("deletion_churn needs a base vector");
      out = StreamSpec::deletion_churn(std::vector<std::int64_t>(s.base, s.base + s.base_len), s.churn_fraction,
                                       s.seed);
      break;
    }
    default:
      throw ParameterError("unknown stream family");
  }
  out.model = to_model(s.model);
  out.validate();
  return out;
}

es_status copy_bytes(const std::string& bytes, std::uint8_t* buf, std::size_t cap, std::size_t* needed) {
  if (needed != nullptr) *needed = bytes.size();
  if (buf == nullptr || cap < bytes.size()) return fail(ES_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, bytes.data(), bytes.size());
  return ES_OK;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const char* path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(std::string("cannot write ") + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* es_last_error(void) { return g_last_error.c_str(); }

const char* es_version(void) { return "0.1.0"; }

const char* es_status_name(es_status status) {
  switch (status) {
    case ES_OK:
      return "ok";
    case ES_ERR_PARAMETER:
      return "parameter error";
    case ES_ERR_PARSE:
      return "parse error";
    case ES_ERR_CONFIGURATION:
      return "configuration error";
    case ES_ERR_UNDEFINED_INPUT:
      return "undefined input";
    case ES_ERR_IO:
      return "io error";
    case ES_ERR_INTERNAL:
      return "internal error";
    case ES_ERR_NO_HEAVY_HITTER:
      return "no heavy hitter";
    case ES_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
  }
  return "unknown status";
}

void es_request_init(es_request* request) {
  if (request == nullptr) return;
  *request = es_request{};
  request->quantity = ES_SHANNON;
  request->alpha = 1.0;
  request->guarantee = ES_ADDITIVE;
  request->epsilon = 0.1;
  request->delta = 0.25;
  request->model = ES_STRICT_TURNSTILE;
  request->n = 4;
  request->m = 4;
}

es_status es_report_format(const es_report* report, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(report, "report");
    const std::string text = format_report(to_cpp_report(*report));
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr || cap < text.size() + 1) return fail(ES_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return ES_OK;
  });
}

void es_stream_spec_init(es_stream_spec* spec) {
  if (spec == nullptr) return;
  *spec = es_stream_spec{};
  spec->family = ES_FAMILY_UNIFORM;
  spec->n = 1;
  spec->m = 1;
  spec->zipf_s = 1.0;
  spec->heavy_weight = 0.5;
  spec->model = ES_STRICT_TURNSTILE;
}

es_status es_stream_create(uint64_t n, es_model model, es_stream** out) {
  return guarded([&] {
    require(out, "out");
    if (n == 0) throw ParameterError("universe size n must be positive");
    auto* s = new es_stream{};
    s->stream.universe_size = n;
    s->stream.model = to_model(model);
    *out = s;
    return ES_OK;
  });
}

es_status es_stream_push(es_stream* stream, uint64_t index, int64_t delta) {
  return guarded([&] {
    require(stream, "stream");
    if (index == 0 || index > stream->stream.universe_size) throw ParameterError("index outside [1, n]");
    stream->stream.events.push_back(UpdateEvent{index, delta});
    return ES_OK;
  });
}

es_status es_stream_generate(const es_stream_spec* spec, es_stream** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    auto s = generate_stream(to_spec(*spec));
    *out = new es_stream{std::move(s)};
    return ES_OK;
  });
}

es_status es_stream_read_file(const char* path, es_stream** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = read_stream_file(path);
    *out = new es_stream{std::move(s)};
    return ES_OK;
  });
}

es_status es_stream_write_file(const es_stream* stream, const char* path) {
  return guarded([&] {
    require(stream, "stream");
    require(path, "path");
    write_stream_file(path, stream->stream);
    return ES_OK;
  });
}

es_status es_stream_info(const es_stream* stream, uint64_t* n, es_model* model, uint64_t* events,
                         uint64_t* total_movement) {
  return guarded([&] {
    require(stream, "stream");
    if (n != nullptr) *n = stream->stream.universe_size;
    if (model != nullptr) *model = from_model(stream->stream.model);
    if (events != nullptr) *events = stream->stream.events.size();
    if (total_movement != nullptr) *total_movement = stream->stream.total_movement();
    return ES_OK;
  });
}

void es_stream_free(es_stream* stream) { delete stream; }

es_status es_exact(const es_stream* stream, es_quantity quantity, double alpha, double* out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    const FrequencyVector fv(stream->stream.universe_size, stream->stream.events);
    *out = exact_value(fv, to_quantity(quantity, alpha));
    return ES_OK;
  });
}

es_status es_estimate(const es_stream* stream, const es_request* request, es_report* out) {
  return guarded([&] {
    require(stream, "stream");
    require(request, "request");
    require(out, "out");
    const auto& s = stream->stream;
    const auto req = to_request(*request, s.universe_size, s.total_movement());
    if (req.universe_size < s.universe_size) throw ParameterError("request n is smaller than the stream's universe");
    if (req.model == StreamModel::strict_turnstile && !validate_strict_turnstile(s.events, s.universe_size))
      throw ParameterError("stream ends with a negative coordinate; use the general update model");
    const auto report = estimate_stream(coalesce(s.universe_size, s.events), req);
    *out = from_cpp_report(report);
    if (report.outcome == Outcome::no_heavy_hitter) return fail(ES_ERR_NO_HEAVY_HITTER, "no heavy hitter present");
    return ES_OK;
  });
}

es_status es_trials(const es_stream_spec* spec, const es_request* request, uint64_t trials,
                    double time_budget_seconds, es_trial_summary* out) {
  return guarded([&] {
    require(spec, "spec");
    require(request, "request");
    require(out, "out");
    const auto s = to_spec(*spec);
    const auto req = to_request(*request, s.universe_size(), s.length);
    TrialOptions options;
    if (time_budget_seconds > 0.0) options.time_budget_seconds = time_budget_seconds;
    const auto summary = run_trials(s, req, trials, options);
    *out = es_trial_summary{summary.trials,         summary.within_tolerance, summary.empirical_rate,
                            summary.mean_abs_error, summary.mean_rel_error,   summary.truncated ? 1 : 0};
    return ES_OK;
  });
}

es_status es_sketch_create(double alpha, uint64_t rows, uint64_t seed, es_sketch** out) {
  return guarded([&] {
    require(out, "out");
    *out = new es_sketch{StableSketch(alpha, rows, seed)};
    return ES_OK;
  });
}

es_status es_sketch_for_accuracy(double alpha, double epsilon, double delta, uint64_t seed, es_sketch** out) {
  return guarded([&] {
    require(out, "out");
    *out = new es_sketch{StableSketch::for_accuracy(alpha, epsilon, delta, seed)};
    return ES_OK;
  });
}

es_status es_sketch_update(es_sketch* sketch, uint64_t index, int64_t delta) {
  return guarded([&] {
    require(sketch, "sketch");
    if (index == 0) throw ParameterError("indices are 1-based");
    sketch->sketch.update(UpdateEvent{index, delta});
    return ES_OK;
  });
}

es_status es_sketch_update_stream(es_sketch* sketch, const es_stream* stream) {
  return guarded([&] {
    require(sketch, "sketch");
    require(stream, "stream");
    sketch->sketch.update(coalesce(stream->stream.universe_size, stream->stream.events));
    return ES_OK;
  });
}

es_status es_sketch_merge(es_sketch* into, const es_sketch* other) {
  return guarded([&] {
    require(into, "into");
    require(other, "other");
    into->sketch.merge(other->sketch);
    return ES_OK;
  });
}

es_status es_sketch_estimate(const es_sketch* sketch, double epsilon, double delta, es_report* out) {
  return guarded([&] {
    require(sketch, "sketch");
    require(out, "out");
    *out = from_cpp_report(sketch->sketch.estimate_moment(epsilon, delta));
    return ES_OK;
  });
}

es_status es_sketch_shape(const es_sketch* sketch, double* alpha, uint64_t* rows, uint64_t* seed) {
  return guarded([&] {
    require(sketch, "sketch");
    if (alpha != nullptr) *alpha = sketch->sketch.alpha();
    if (rows != nullptr) *rows = sketch->sketch.rows();
    if (seed != nullptr) *seed = sketch->sketch.seed();
    return ES_OK;
  });
}

es_status es_sketch_projections(const es_sketch* sketch, double* out, size_t cap, size_t* count) {
  return guarded([&] {
    require(sketch, "sketch");
    const auto& p = sketch->sketch.projections();
    if (count != nullptr) *count = p.size();
    if (out != nullptr) std::copy_n(p.begin(), std::min(cap, p.size()), out);
    return ES_OK;
  });
}

es_status es_sketch_to_bytes(const es_sketch* sketch, uint8_t* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(sketch, "sketch");
    return copy_bytes(sketch->sketch.to_bytes(), buf, cap, needed);
  });
}

es_status es_sketch_from_bytes(const uint8_t* buf, size_t len, es_sketch** out) {
  return guarded([&] {
    require(buf, "buf");
    require(out, "out");
    *out = new es_sketch{StableSketch::from_bytes(std::string(reinterpret_cast<const char*>(buf), len))};
    return ES_OK;
  });
}

es_status es_sketch_save(const es_sketch* sketch, const char* path) {
  return guarded([&] {
    require(sketch, "sketch");
    require(path, "path");
    write_file(path, sketch->sketch.to_bytes());
    return ES_OK;
  });
}

es_status es_sketch_load(const char* path, es_sketch** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new es_sketch{StableSketch::from_bytes(read_file(path))};
    return ES_OK;
  });
}

void es_sketch_free(es_sketch* sketch) { delete sketch; }

es_status es_heavy_hitter_create(uint64_t n, double epsilon, uint64_t seed, uint32_t repetitions,
                                 es_heavy_hitter** out) {
  return guarded([&] {
    require(out, "out");
    *out = new es_heavy_hitter{
        HeavyHitterSketch(n, epsilon, seed, repetitions == 0 ? kDefaultRepetitions : repetitions)};
    return ES_OK;
  });
}

es_status es_heavy_hitter_update(es_heavy_hitter* hh, uint64_t index, int64_t delta) {
  return guarded([&] {
    require(hh, "hh");
    hh->hh.update(UpdateEvent{index, delta});
    return ES_OK;
  });
}

es_status es_heavy_hitter_update_stream(es_heavy_hitter* hh, const es_stream* stream) {
  return guarded([&] {
    require(hh, "hh");
    require(stream, "stream");
    hh->hh.update(coalesce(stream->stream.universe_size, stream->stream.events));
    return ES_OK;
  });
}

es_status es_heavy_hitter_merge(es_heavy_hitter* into, const es_heavy_hitter* other) {
  return guarded([&] {
    require(into, "into");
    require(other, "other");
    into->hh.merge(other->hh);
    return ES_OK;
  });
}

es_status es_heavy_hitter_detect(const es_heavy_hitter* hh, int* detected) {
  return guarded([&] {
    require(hh, "hh");
    require(detected, "detected");
    *detected = hh->hh.detect() ? 1 : 0;
    return ES_OK;
  });
}

es_status es_heavy_hitter_locate(const es_heavy_hitter* hh, uint64_t* index, double* residual_l1) {
  return guarded([&] {
    require(hh, "hh");
    const auto heavy = locate_heavy(hh->hh);
    if (!heavy) return fail(ES_ERR_NO_HEAVY_HITTER, "no heavy hitter present");
    if (index != nullptr) *index = heavy->index;
    if (residual_l1 != nullptr) *residual_l1 = heavy->residual_l1;
    return ES_OK;
  });
}

es_status es_heavy_hitter_space_words(const es_heavy_hitter* hh, uint64_t* words) {
  return guarded([&] {
    require(hh, "hh");
    require(words, "words");
    *words = hh->hh.space_words();
    return ES_OK;
  });
}

es_status es_heavy_hitter_save(const es_heavy_hitter* hh, const char* path) {
  return guarded([&] {
    require(hh, "hh");
    require(path, "path");
    write_file(path, hh->hh.to_bytes());
    return ES_OK;
  });
}

es_status es_heavy_hitter_load(const char* path, es_heavy_hitter** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new es_heavy_hitter{HeavyHitterSketch::from_bytes(read_file(path))};
    return ES_OK;
  });
}

void es_heavy_hitter_free(es_heavy_hitter* hh) { delete hh; }

}  // extern "C"
