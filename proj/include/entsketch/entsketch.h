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

/* C interface to the entsketch library. All handles are opaque; every
 * fallible call returns an es_status and leaves a message retrievable with
 * es_last_error() on the calling thread. */

#ifndef ENTSKETCH_ENTSKETCH_H_
#define ENTSKETCH_ENTSKETCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ENTSKETCH_BUILDING)
#define ES_API __attribute__((visibility("default")))
#else
#define ES_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum es_status {
  ES_OK = 0,
  ES_ERR_PARAMETER = 1,
  ES_ERR_PARSE = 2,
  ES_ERR_CONFIGURATION = 3,
  ES_ERR_UNDEFINED_INPUT = 4,
  ES_ERR_IO = 5,
  ES_ERR_INTERNAL = 6,
  ES_ERR_NO_HEAVY_HITTER = 7,
  ES_ERR_BUFFER_TOO_SMALL = 8
} es_status;

typedef enum es_quantity {
  ES_SHANNON = 0,
  ES_RENYI = 1,
  ES_TSALLIS = 2,
  ES_MOMENT = 3,
  ES_RESIDUAL_MOMENT = 4
} es_quantity;

typedef enum es_guarantee { ES_ADDITIVE = 0, ES_MULTIPLICATIVE = 1 } es_guarantee;

typedef enum es_model { ES_STRICT_TURNSTILE = 0, ES_GENERAL_UPDATE = 1 } es_model;

typedef enum es_family {
  ES_FAMILY_UNIFORM = 0,
  ES_FAMILY_POINT_MASS = 1,
  ES_FAMILY_ZIPF = 2,
  ES_FAMILY_HEAVY_PLUS_UNIFORM = 3,
  ES_FAMILY_DELETION_CHURN = 4
} es_family;

typedef struct es_stream es_stream;
typedef struct es_sketch es_sketch;
typedef struct es_heavy_hitter es_heavy_hitter;

/* Message for the last failed call on this thread; "" after a success. */
ES_API const char* es_last_error(void);
ES_API const char* es_version(void);
ES_API const char* es_status_name(es_status status);

/* ---- requests and reports ---------------------------------------------- */

typedef struct es_request {
  es_quantity quantity;
  double alpha; /* ignored for Shannon */
  es_guarantee guarantee;
  double epsilon;
  double delta;
  es_model model;
  uint64_t n;
  uint64_t m; /* upper bound on the stream's L1 mass */
  uint64_t seed;
  int shannon_onepoint; /* nonzero selects the one-point additive estimator */
  int base2;            /* report entropies in bits */
} es_request;

/* Shannon, additive, epsilon 0.1, delta 0.25, strict, n = m = 4, seed 0. */
ES_API void es_request_init(es_request* request);

typedef struct es_report {
  double value;         /* nats */
  double display_value; /* value in the requested base */
  es_quantity quantity;
  double alpha;
  es_guarantee guarantee;
  double epsilon;
  double success_prob;
  uint64_t seed;
  uint64_t space_words_used;
  int no_heavy_hitter;
  int degenerate;
  int ambiguous;
  int heavy_path;
  int base2;
} es_report;

/* Writes the key=value text form. `needed` (optional) receives the size
 * including the terminating NUL; ES_ERR_BUFFER_TOO_SMALL if cap is short. */
ES_API es_status es_report_format(const es_report* report, char* buf, size_t cap, size_t* needed);

/* ---- streams -------------------------------------------------------------- */

typedef struct es_stream_spec {
  es_family family;
  uint64_t n;
  uint64_t m;
  double zipf_s;
  double heavy_weight;
  double churn_fraction;
  const int64_t* base; /* deletion_churn only */
  size_t base_len;
  es_model model;
  uint64_t seed;
} es_stream_spec;

ES_API void es_stream_spec_init(es_stream_spec* spec);

ES_API es_status es_stream_create(uint64_t n, es_model model, es_stream** out);
ES_API es_status es_stream_push(es_stream* stream, uint64_t index, int64_t delta);
ES_API es_status es_stream_generate(const es_stream_spec* spec, es_stream** out);
ES_API es_status es_stream_read_file(const char* path, es_stream** out);
ES_API es_status es_stream_write_file(const es_stream* stream, const char* path);
ES_API es_status es_stream_info(const es_stream* stream, uint64_t* n, es_model* model, uint64_t* events,
                                uint64_t* total_movement);
ES_API void es_stream_free(es_stream* stream);

/* Exact value of a quantity on the stream's net vector. */
ES_API es_status es_exact(const es_stream* stream, es_quantity quantity, double alpha, double* out);

/* Sketches the stream according to the request. If request->n is 0 the
 * stream's universe is used; if request->m is 0 its total movement is. */
ES_API es_status es_estimate(const es_stream* stream, const es_request* request, es_report* out);

typedef struct es_trial_summary {
  uint64_t trials;
  uint64_t within_tolerance;
  double empirical_rate;
  double mean_abs_error;
  double mean_rel_error;
  int truncated;
} es_trial_summary;

/* time_budget_seconds <= 0 means no budget. */
ES_API es_status es_trials(const es_stream_spec* spec, const es_request* request, uint64_t trials,
                           double time_budget_seconds, es_trial_summary* out);

/* ---- stable moment sketches ---------------------------------------------- */

ES_API es_status es_sketch_create(double alpha, uint64_t rows, uint64_t seed, es_sketch** out);
ES_API es_status es_sketch_for_accuracy(double alpha, double epsilon, double delta, uint64_t seed,
                                        es_sketch** out);
ES_API es_status es_sketch_update(es_sketch* sketch, uint64_t index, int64_t delta);
ES_API es_status es_sketch_update_stream(es_sketch* sketch, const es_stream* stream);
ES_API es_status es_sketch_merge(es_sketch* into, const es_sketch* other);
ES_API es_status es_sketch_estimate(const es_sketch* sketch, double epsilon, double delta, es_report* out);
ES_API es_status es_sketch_shape(const es_sketch* sketch, double* alpha, uint64_t* rows, uint64_t* seed);
/* Copies up to cap projections; `count` receives the row count. */
ES_API es_status es_sketch_projections(const es_sketch* sketch, double* out, size_t cap, size_t* count);
ES_API es_status es_sketch_to_bytes(const es_sketch* sketch, uint8_t* buf, size_t cap, size_t* needed);
ES_API es_status es_sketch_from_bytes(const uint8_t* buf, size_t len, es_sketch** out);
ES_API es_status es_sketch_save(const es_sketch* sketch, const char* path);
ES_API es_status es_sketch_load(const char* path, es_sketch** out);
ES_API void es_sketch_free(es_sketch* sketch);

/* ---- heavy-hitter sketches ----------------------------------------------- */

/* repetitions 0 selects the default. */
ES_API es_status es_heavy_hitter_create(uint64_t n, double epsilon, uint64_t seed, uint32_t repetitions,
                                        es_heavy_hitter** out);
ES_API es_status es_heavy_hitter_update(es_heavy_hitter* hh, uint64_t index, int64_t delta);
ES_API es_status es_heavy_hitter_update_stream(es_heavy_hitter* hh, const es_stream* stream);
ES_API es_status es_heavy_hitter_merge(es_heavy_hitter* into, const es_heavy_hitter* other);
ES_API es_status es_heavy_hitter_detect(const es_heavy_hitter* hh, int* detected);
/* ES_ERR_NO_HEAVY_HITTER when detection, decoding or certification fails. */
ES_API es_status es_heavy_hitter_locate(const es_heavy_hitter* hh, uint64_t* index, double* residual_l1);
ES_API es_status es_heavy_hitter_space_words(const es_heavy_hitter* hh, uint64_t* words);
ES_API es_status es_heavy_hitter_save(const es_heavy_hitter* hh, const char* path);
ES_API es_status es_heavy_hitter_load(const char* path, es_heavy_hitter** out);
ES_API void es_heavy_hitter_free(es_heavy_hitter* hh);

#ifdef __cplusplus
}
#endif

#endif /* ENTSKETCH_ENTSKETCH_H_ */
