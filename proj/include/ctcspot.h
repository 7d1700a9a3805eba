/* Copyright 2026 CTCSpot Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the ctcspot keyword spotting engine.
 *
 * Objects are opaque handles; every fallible call returns a ctcspot_status
 * and a thread-local message is available from ctcspot_last_error(). The
 * model, once loaded, is immutable and may be shared across threads; each
 * spotter handle is a single-stream session with a single writer.
 */

#ifndef CTCSPOT_H
#define CTCSPOT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CTCSPOT_BUILD)
#define CTCSPOT_API __declspec(dllexport)
#else
#define CTCSPOT_API __declspec(dllimport)
#endif
#else
#define CTCSPOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctcspot_status {
  CTCSPOT_OK = 0,
  CTCSPOT_EINVAL = 1,    /* bad arguments or option values */
  CTCSPOT_EDATA = 2,     /* file format, shape or content mismatch */
  CTCSPOT_EDIVERGED = 3  /* training produced non-finite values */
} ctcspot_status;

/* Message for the last failure on this thread. Never NULL. */
CTCSPOT_API const char* ctcspot_last_error(void);
CTCSPOT_API const char* ctcspot_status_name(ctcspot_status status);
CTCSPOT_API const char* ctcspot_version(void);

/* ---------------------------------------------------------------- model */

typedef struct ctcspot_model ctcspot_model;

CTCSPOT_API ctcspot_status ctcspot_model_load(const char* path,
                                              ctcspot_model** out);
CTCSPOT_API ctcspot_status ctcspot_model_save(const ctcspot_model* model,
                                              const char* path);
CTCSPOT_API void ctcspot_model_free(ctcspot_model* model);

CTCSPOT_API int ctcspot_model_input_dim(const ctcspot_model* model);
CTCSPOT_API int ctcspot_model_output_dim(const ctcspot_model* model);
CTCSPOT_API int ctcspot_model_num_layers(const ctcspot_model* model);
/* returns 0 when layer is out of range */
CTCSPOT_API int ctcspot_model_layer_size(const ctcspot_model* model,
                                         int layer);

/* ------------------------------------------------- corpus synthesis */

typedef struct ctcspot_synth_options {
  int feature_dim;
  int mean_duration;      /* frames per character */
  int duration_jitter;
  double separation;      /* template vector norm */
  double noise_std;
  uint64_t seed;
  int train_sentences;
  int eval_sentences;
  int min_words;
  int max_words;
  const char* vocab_file; /* optional custom vocabulary, one word per line */
} ctcspot_synth_options;

CTCSPOT_API void ctcspot_synth_options_init(ctcspot_synth_options* options);
CTCSPOT_API ctcspot_status ctcspot_synth_run(
    const ctcspot_synth_options* options, const char* out_dir);

/* --------------------------------------------------------- training */

typedef struct ctcspot_train_options {
  const char* layer_sizes;   /* comma separated, e.g. "32,32,32" */
  int unroll_length;
  int update_period;
  double learning_rate;
  double momentum;
  double grad_clip;
  int max_updates;
  uint64_t seed;
  int anneal_interval;       /* 0 disables annealing/early stopping */
  int max_anneals;
  double validation_fraction;
  /* optional progress callback, called after every weight update */
  void (*on_update)(void* user, int update, double loss_per_label,
                    double learning_rate);
  void* on_update_user;
} ctcspot_train_options;

CTCSPOT_API void ctcspot_train_options_init(ctcspot_train_options* options);
CTCSPOT_API ctcspot_status ctcspot_train_run(
    const ctcspot_train_options* options, const char* corpus_dir,
    const char* model_path, const char* loss_log_csv /* may be NULL */);

/* --------------------------------------------------------- spotting */

enum {
  CTCSPOT_MODE_KEYWORD_ONLY = 0,
  CTCSPOT_MODE_FILLER = 1
};
enum {
  CTCSPOT_SEMANTICS_SUM = 0,
  CTCSPOT_SEMANTICS_MAX = 1
};

typedef struct ctcspot_spotter_options {
  int mode;                  /* CTCSPOT_MODE_* */
  int semantics;             /* CTCSPOT_SEMANTICS_*; filler requires MAX */
  double per_char_threshold; /* detection threshold per keyword character */
  int refractory;            /* frames a detection region may dip before closing */
} ctcspot_spotter_options;

CTCSPOT_API void ctcspot_spotter_options_init(
    ctcspot_spotter_options* options);

typedef struct ctcspot_spotter ctcspot_spotter;

typedef struct ctcspot_event {
  int64_t frame;        /* peak frame of the detection region */
  double time_seconds;  /* frame * 10 ms */
  double score;         /* keyword log posterior (difference in filler mode) */
  int32_t keyword;      /* index into the keyword list */
} ctcspot_event;

CTCSPOT_API ctcspot_status ctcspot_spotter_create(
    const ctcspot_model* model, const char* const* keywords,
    size_t keyword_count, const ctcspot_spotter_options* options,
    ctcspot_spotter** out);
CTCSPOT_API void ctcspot_spotter_free(ctcspot_spotter* spotter);

/* 16 kHz mono samples in [-1, 1]; requires an audio (123-input) model */
CTCSPOT_API ctcspot_status ctcspot_spotter_feed_audio(
    ctcspot_spotter* spotter, const float* samples, size_t count);
/* raw feature frames, row-major, frame_count x input_dim */
CTCSPOT_API ctcspot_status ctcspot_spotter_feed_features(
    ctcspot_spotter* spotter, const float* frames, size_t frame_count);
/* label posterior frames, row-major, frame_count x output_dim */
CTCSPOT_API ctcspot_status ctcspot_spotter_feed_posteriors(
    ctcspot_spotter* spotter, const float* frames, size_t frame_count);
/* flush lookahead and close open detection regions */
CTCSPOT_API ctcspot_status ctcspot_spotter_finish(ctcspot_spotter* spotter);
CTCSPOT_API ctcspot_status ctcspot_spotter_reset(ctcspot_spotter* spotter);

/* moves up to `capacity` pending events into `out`; returns the count */
CTCSPOT_API size_t ctcspot_spotter_take_events(ctcspot_spotter* spotter,
                                               ctcspot_event* out,
                                               size_t capacity);
CTCSPOT_API int64_t ctcspot_spotter_frames_seen(
    const ctcspot_spotter* spotter);

/* per-frame detection scores, one value per keyword */
typedef void (*ctcspot_score_callback)(void* user, int64_t frame,
                                       const double* scores, size_t count);
CTCSPOT_API ctcspot_status ctcspot_spotter_set_score_callback(
    ctcspot_spotter* spotter, ctcspot_score_callback callback, void* user);

/* ------------------------------------------------ file-level pipelines */

/* Streams a .wav file or a feature/posterior stream file through a
 * spotter; writes detections CSV (frame,time_seconds,keyword,score) and,
 * when scores_path is non-NULL, a per-frame score stream. chunk_frames is
 * the I/O block size and does not affect the results (pass 0 for the
 * default). */
CTCSPOT_API ctcspot_status ctcspot_spot_file(
    const ctcspot_model* model, const char* input_path,
    const char* const* keywords, size_t keyword_count,
    const ctcspot_spotter_options* options, int chunk_frames,
    const char* detections_csv, const char* scores_path /* may be NULL */);

typedef struct ctcspot_eval_options {
  int match_window;   /* frames around the truth end frame */
  int refractory;
  double sweep_lo;    /* per-character threshold sweep */
  double sweep_hi;
  int sweep_steps;
} ctcspot_eval_options;

CTCSPOT_API void ctcspot_eval_options_init(ctcspot_eval_options* options);

typedef struct ctcspot_eval_result {
  double max_f1;
  double best_threshold;  /* per-character */
  int tp;
  int fp;
  int fn;
  int latency_count;      /* matched detections at the best threshold */
  double latency_median_ms;
  double latency_mean_ms;
  double latency_max_ms;
} ctcspot_eval_result;

/* Threshold sweep over a score stream written by ctcspot_spot_file. */
CTCSPOT_API ctcspot_status ctcspot_eval_scores(
    const char* scores_path, const char* keywords_file, const char* truth_csv,
    const ctcspot_eval_options* options, const char* pr_csv /* may be NULL */,
    ctcspot_eval_result* result);

/* Fixed operating point from a detections CSV. keywords_file may be NULL
 * when the truth table only lists tested keywords. */
CTCSPOT_API ctcspot_status ctcspot_eval_detections(
    const char* detections_csv, const char* truth_csv,
    const char* keywords_file, const ctcspot_eval_options* options,
    ctcspot_eval_result* result);

/* ------------------------------------------------- streams and audio */

enum {
  CTCSPOT_STREAM_FEATURES = 0,
  CTCSPOT_STREAM_POSTERIORS = 1,
  CTCSPOT_STREAM_SCORES = 2
};

typedef struct ctcspot_stream_reader ctcspot_stream_reader;

CTCSPOT_API ctcspot_status ctcspot_stream_open(const char* path,
                                               ctcspot_stream_reader** out);
CTCSPOT_API void ctcspot_stream_close(ctcspot_stream_reader* reader);
CTCSPOT_API int ctcspot_stream_kind(const ctcspot_stream_reader* reader);
CTCSPOT_API int ctcspot_stream_dim(const ctcspot_stream_reader* reader);
CTCSPOT_API double ctcspot_stream_frame_period_ms(
    const ctcspot_stream_reader* reader);
CTCSPOT_API int64_t ctcspot_stream_frame_count(
    const ctcspot_stream_reader* reader);
/* reads up to max_frames frames into `out` (row-major); returns the count */
CTCSPOT_API size_t ctcspot_stream_read(ctcspot_stream_reader* reader,
                                       float* out, size_t max_frames);

typedef struct ctcspot_stream_writer ctcspot_stream_writer;

CTCSPOT_API ctcspot_status ctcspot_stream_writer_create(
    const char* path, int kind, int dim, double frame_period_ms,
    ctcspot_stream_writer** out);
CTCSPOT_API ctcspot_status ctcspot_stream_write(ctcspot_stream_writer* writer,
                                                const float* frames,
                                                size_t frame_count);
CTCSPOT_API ctcspot_status ctcspot_stream_writer_close(
    ctcspot_stream_writer* writer);

/* mono 16-bit PCM; the sample buffer is malloc'd, free with ctcspot_free */
CTCSPOT_API ctcspot_status ctcspot_wav_read(const char* path, float** samples,
                                            size_t* count, int* sample_rate);
CTCSPOT_API void ctcspot_free(void* ptr);

/* keyword list file: one keyword per line, '#' comments */
typedef struct ctcspot_keywords ctcspot_keywords;

CTCSPOT_API ctcspot_status ctcspot_keywords_load(const char* path,
                                                 ctcspot_keywords** out);
CTCSPOT_API size_t ctcspot_keywords_count(const ctcspot_keywords* keywords);
CTCSPOT_API const char* ctcspot_keywords_get(const ctcspot_keywords* keywords,
                                             size_t index);
CTCSPOT_API void ctcspot_keywords_free(ctcspot_keywords* keywords);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CTCSPOT_H */
