// Copyright 2026 CTCSpot Authors
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

#include "ctcspot.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "corpus_io.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"
#include "spotter.hpp"
#include "stream_file.hpp"
#include "wav.hpp"

using namespace ctcspot;

namespace {

thread_local std::string g_last_error = "ok";

ctcspot_status fail(ctcspot_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
ctcspot_status guarded(Fn&& fn) {
  try {
    fn();
    return CTCSPOT_OK;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what();
    return CTCSPOT_EINVAL;
  } catch (const DivergenceError& e) {
    g_last_error = e.what();
    return CTCSPOT_EDIVERGED;
  } catch (const DataError& e) {
    g_last_error = e.what();
    return CTCSPOT_EDATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CTCSPOT_EDATA;
  }
}

std::vector<std::string> to_strings(const char* const* items, size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    if (!items[i]) throw InvalidArgument("null keyword");
    out.emplace_back(items[i]);
  }
  return out;
}

spot::SpotterOptions to_spotter_options(const ctcspot_spotter_options* opt) {
  spot::SpotterOptions out;
  if (!opt) return out;
  switch (opt->mode) {
    case CTCSPOT_MODE_KEYWORD_ONLY:
      out.mode = spot::Mode::kKeywordOnly;
      break;
    case CTCSPOT_MODE_FILLER:
      out.mode = spot::Mode::kFiller;
      break;
    default:
      throw InvalidArgument("unknown spotter mode");
  }
  switch (opt->semantics) {
    case CTCSPOT_SEMANTICS_SUM:
      out.semantics = kws::Semantics::kSum;
      break;
    case CTCSPOT_SEMANTICS_MAX:
      out.semantics = kws::Semantics::kMax;
      break;
    default:
      throw InvalidArgument("unknown path-combination semantics");
  }
  out.per_char_threshold = opt->per_char_threshold;
  out.refractory = opt->refractory;
  return out;
}

pipeline::EvalOptions to_eval_options(const ctcspot_eval_options* opt) {
  pipeline::EvalOptions out;
  if (!opt) return out;
  out.match_window = opt->match_window;
  out.refractory = opt->refractory;
  out.sweep_lo = opt->sweep_lo;
  out.sweep_hi = opt->sweep_hi;
  out.sweep_steps = opt->sweep_steps;
  return out;
}

void fill_eval_result(const pipeline::EvalSummary& summary,
                      ctcspot_eval_result* result) {
  std::memset(result, 0, sizeof(*result));
  result->max_f1 = summary.max_f1;
  result->best_threshold = summary.best_threshold;
  result->tp = summary.tp;
  result->fp = summary.fp;
  result->fn = summary.fn;
  if (summary.latency) {
    result->latency_count = summary.latency->count;
    result->latency_median_ms = summary.latency->median_ms();
    result->latency_mean_ms = summary.latency->mean_ms();
    result->latency_max_ms = summary.latency->max_ms();
  }
}

std::vector<int> parse_layer_sizes(const char* spec) {
  if (!spec || !*spec) throw InvalidArgument("empty layer size list");
  std::vector<int> sizes;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size() || v <= 0) {
      throw InvalidArgument("bad layer size: " + item);
    }
    sizes.push_back(v);
  }
  return sizes;
}

}  // namespace

struct ctcspot_model {
  std::shared_ptr<const Model> model;
};

struct ctcspot_spotter {
  std::unique_ptr<spot::Spotter> impl;
  int input_dim = 0;
  int output_dim = 0;
  std::vector<kws::DetectionEvent> spill;  // events not yet handed out
  ctcspot_score_callback score_cb = nullptr;
  void* score_user = nullptr;
};

struct ctcspot_stream_reader {
  std::unique_ptr<StreamReader> impl;
};

struct ctcspot_stream_writer {
  std::unique_ptr<StreamWriter> impl;
  int dim = 0;
};

struct ctcspot_keywords {
  std::vector<std::string> items;
};

namespace {

// shared buffer conversion for the three feed entry points
template <typename Feed>
ctcspot_status feed_frames(ctcspot_spotter* spotter, const float* frames,
                           size_t frame_count, int dim, Feed&& feed) {
  if (!spotter || (!frames && frame_count > 0)) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    std::vector<net::Vec> converted(frame_count);
    for (size_t t = 0; t < frame_count; ++t) {
      net::Vec v(dim);
      for (int i = 0; i < dim; ++i) {
        v[i] = static_cast<double>(frames[t * static_cast<size_t>(dim) + i]);
      }
      converted[t] = std::move(v);
    }
    feed(converted);
  });
}

}  // namespace


extern "C" {

const char* ctcspot_last_error(void) { return g_last_error.c_str(); }

const char* ctcspot_status_name(ctcspot_status status) {
  switch (status) {
    case CTCSPOT_OK:
      return "ok";
    case CTCSPOT_EINVAL:
      return "invalid argument";
    case CTCSPOT_EDATA:
      return "data error";
    case CTCSPOT_EDIVERGED:
      return "diverged";
  }
  return "unknown";
}

const char* ctcspot_version(void) { return "1.0.0"; }

ctcspot_status ctcspot_model_load(const char* path, ctcspot_model** out) {
  if (!path || !out) return fail(CTCSPOT_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<ctcspot_model>();
    handle->model = std::make_shared<const Model>(load_model(path));
    *out = handle.release();
  });
}

ctcspot_status ctcspot_model_save(const ctcspot_model* model,
                                  const char* path) {
  if (!model || !path) return fail(CTCSPOT_EINVAL, "null argument");
  return guarded([&] { save_model(*model->model, path); });
}

void ctcspot_model_free(ctcspot_model* model) { delete model; }

int ctcspot_model_input_dim(const ctcspot_model* model) {
  return model ? model->model->config.input_dim : 0;
}

int ctcspot_model_output_dim(const ctcspot_model* model) {
  return model ? model->model->config.output_dim : 0;
}

int ctcspot_model_num_layers(const ctcspot_model* model) {
  return model ? static_cast<int>(model->model->config.layer_sizes.size()) : 0;
}

int ctcspot_model_layer_size(const ctcspot_model* model, int layer) {
  if (!model || layer < 0 ||
      layer >= static_cast<int>(model->model->config.layer_sizes.size())) {
    return 0;
  }
  return model->model->config.layer_sizes[static_cast<std::size_t>(layer)];
}

void ctcspot_synth_options_init(ctcspot_synth_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
  synth::SynthConfig defaults;
  options->feature_dim = defaults.feature_dim;
  options->mean_duration = defaults.mean_duration;
  options->duration_jitter = defaults.duration_jitter;
  options->separation = defaults.separation;
  options->noise_std = defaults.noise_std;
  options->seed = defaults.seed;
  pipeline::SynthOptions pd;
  options->train_sentences = pd.train_sentences;
  options->eval_sentences = pd.eval_sentences;
  options->min_words = pd.min_words;
  options->max_words = pd.max_words;
  options->vocab_file = nullptr;
}

ctcspot_status ctcspot_synth_run(const ctcspot_synth_options* options,
                                 const char* out_dir) {
  if (!options || !out_dir) return fail(CTCSPOT_EINVAL, "null argument");
  return guarded([&] {
    pipeline::SynthOptions opts;
    opts.synth.feature_dim = options->feature_dim;
    opts.synth.mean_duration = options->mean_duration;
    opts.synth.duration_jitter = options->duration_jitter;
    opts.synth.separation = options->separation;
    opts.synth.noise_std = options->noise_std;
    opts.synth.seed = options->seed;
    opts.train_sentences = options->train_sentences;
    opts.eval_sentences = options->eval_sentences;
    opts.min_words = options->min_words;
    opts.max_words = options->max_words;
    if (options->vocab_file) opts.vocab_file = options->vocab_file;
    pipeline::synth_run(opts, out_dir);
  });
}

void ctcspot_train_options_init(ctcspot_train_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
  pipeline::TrainRunOptions defaults;
  options->layer_sizes = "32,32,32";
  options->unroll_length = defaults.unroll_length;
  options->update_period = defaults.update_period;
  options->learning_rate = defaults.learning_rate;
  options->momentum = defaults.momentum;
  options->grad_clip = defaults.grad_clip;
  options->max_updates = defaults.max_updates;
  options->seed = defaults.seed;
  options->anneal_interval = defaults.anneal_interval;
  options->max_anneals = defaults.max_anneals;
  options->validation_fraction = defaults.validation_fraction;
}

ctcspot_status ctcspot_train_run(const ctcspot_train_options* options,
                                 const char* corpus_dir,
                                 const char* model_path,
                                 const char* loss_log_csv) {
  if (!options || !corpus_dir || !model_path) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    pipeline::TrainRunOptions opts;
    opts.layer_sizes = parse_layer_sizes(options->layer_sizes);
    opts.unroll_length = options->unroll_length;
    opts.update_period = options->update_period;
    opts.learning_rate = options->learning_rate;
    opts.momentum = options->momentum;
    opts.grad_clip = options->grad_clip;
    opts.max_updates = options->max_updates;
    opts.seed = options->seed;
    opts.anneal_interval = options->anneal_interval;
    opts.max_anneals = options->max_anneals;
    opts.validation_fraction = options->validation_fraction;
    if (options->on_update) {
      auto cb = options->on_update;
      void* user = options->on_update_user;
      opts.on_update = [cb, user](const train::LossPoint& p) {
        cb(user, p.update, p.loss_per_label, p.learning_rate);
      };
    }
    pipeline::train_run(opts, corpus_dir, model_path,
                        loss_log_csv ? loss_log_csv : "");
  });
}

void ctcspot_spotter_options_init(ctcspot_spotter_options* options) {
  if (!options) return;
  spot::SpotterOptions defaults;
  options->mode = CTCSPOT_MODE_KEYWORD_ONLY;
  options->semantics = CTCSPOT_SEMANTICS_SUM;
  options->per_char_threshold = defaults.per_char_threshold;
  options->refractory = defaults.refractory;
}

ctcspot_status ctcspot_spotter_create(const ctcspot_model* model,
                                      const char* const* keywords,
                                      size_t keyword_count,
                                      const ctcspot_spotter_options* options,
                                      ctcspot_spotter** out) {
  if (!model || !keywords || !out) return fail(CTCSPOT_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<ctcspot_spotter>();
    handle->impl = std::make_unique<spot::Spotter>(
        model->model, to_strings(keywords, keyword_count),
        to_spotter_options(options));
    handle->input_dim = model->model->config.input_dim;
    handle->output_dim = model->model->config.output_dim;
    *out = handle.release();
  });
}

void ctcspot_spotter_free(ctcspot_spotter* spotter) { delete spotter; }

ctcspot_status ctcspot_spotter_feed_audio(ctcspot_spotter* spotter,
                                          const float* samples, size_t count) {
  if (!spotter || (!samples && count > 0)) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    std::vector<double> converted(samples, samples + count);
    spotter->impl->feed_audio(converted);
  });
}

ctcspot_status ctcspot_spotter_feed_features(ctcspot_spotter* spotter,
                                             const float* frames,
                                             size_t frame_count) {
  if (!spotter) return fail(CTCSPOT_EINVAL, "null argument");
  return feed_frames(spotter, frames, frame_count, spotter->input_dim,
                     [&](const std::vector<net::Vec>& v) {
                       spotter->impl->feed_features(v);
                     });
}

ctcspot_status ctcspot_spotter_feed_posteriors(ctcspot_spotter* spotter,
                                               const float* frames,
                                               size_t frame_count) {
  if (!spotter) return fail(CTCSPOT_EINVAL, "null argument");
  return feed_frames(spotter, frames, frame_count, spotter->output_dim,
                     [&](const std::vector<net::Vec>& v) {
                       spotter->impl->feed_posteriors(v);
                     });
}

ctcspot_status ctcspot_spotter_finish(ctcspot_spotter* spotter) {
  if (!spotter) return fail(CTCSPOT_EINVAL, "null argument");
  return guarded([&] { spotter->impl->finish(); });
}

ctcspot_status ctcspot_spotter_reset(ctcspot_spotter* spotter) {
  if (!spotter) return fail(CTCSPOT_EINVAL, "null argument");
  return guarded([&] {
    spotter->impl->reset();
    spotter->spill.clear();
  });
}

size_t ctcspot_spotter_take_events(ctcspot_spotter* spotter,
                                   ctcspot_event* out, size_t capacity) {
  if (!spotter || !out) return 0;
  auto fresh = spotter->impl->take_events();
  spotter->spill.insert(spotter->spill.end(), fresh.begin(), fresh.end());
  const size_t n = std::min(capacity, spotter->spill.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& ev = spotter->spill[i];
    out[i].frame = ev.frame;
    out[i].time_seconds = static_cast<double>(ev.frame) / 100.0;
    out[i].score = ev.score;
    out[i].keyword = ev.keyword;
  }
  spotter->spill.erase(spotter->spill.begin(),
                       spotter->spill.begin() + static_cast<long>(n));
  return n;
}

int64_t ctcspot_spotter_frames_seen(const ctcspot_spotter* spotter) {
  return spotter ? spotter->impl->frames_seen() : 0;
}

ctcspot_status ctcspot_spotter_set_score_callback(
    ctcspot_spotter* spotter, ctcspot_score_callback callback, void* user) {
  if (!spotter) return fail(CTCSPOT_EINVAL, "null argument");
  spotter->score_cb = callback;
  spotter->score_user = user;
  if (callback) {
    spotter->impl->set_score_callback(
        [spotter](long frame, std::span<const double> scores) {
          spotter->score_cb(spotter->score_user, frame, scores.data(),
                            scores.size());
        });
  } else {
    spotter->impl->set_score_callback(nullptr);
  }
  return CTCSPOT_OK;
}

ctcspot_status ctcspot_spot_file(const ctcspot_model* model,
                                 const char* input_path,
                                 const char* const* keywords,
                                 size_t keyword_count,
                                 const ctcspot_spotter_options* options,
                                 int chunk_frames, const char* detections_csv,
                                 const char* scores_path) {
  if (!model || !input_path || !keywords || !detections_csv) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    pipeline::SpotFileOptions opts;
    opts.spotter = to_spotter_options(options);
    if (chunk_frames > 0) opts.chunk_frames = chunk_frames;
    pipeline::spot_file(*model->model, input_path,
                        to_strings(keywords, keyword_count), opts,
                        detections_csv, scores_path ? scores_path : "");
  });
}

void ctcspot_eval_options_init(ctcspot_eval_options* options) {
  if (!options) return;
  pipeline::EvalOptions defaults;
  options->match_window = defaults.match_window;
  options->refractory = defaults.refractory;
  options->sweep_lo = defaults.sweep_lo;
  options->sweep_hi = defaults.sweep_hi;
  options->sweep_steps = defaults.sweep_steps;
}

ctcspot_status ctcspot_eval_scores(const char* scores_path,
                                   const char* keywords_file,
                                   const char* truth_csv,
                                   const ctcspot_eval_options* options,
                                   const char* pr_csv,
                                   ctcspot_eval_result* result) {
  if (!scores_path || !keywords_file || !truth_csv || !result) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    auto summary =
        pipeline::eval_scores(scores_path, keywords_file, truth_csv,
                              to_eval_options(options), pr_csv ? pr_csv : "");
    fill_eval_result(summary, result);
  });
}

ctcspot_status ctcspot_eval_detections(const char* detections_csv,
                                       const char* truth_csv,
                                       const char* keywords_file,
                                       const ctcspot_eval_options* options,
                                       ctcspot_eval_result* result) {
  if (!detections_csv || !truth_csv || !result) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    auto summary = pipeline::eval_detections(
        detections_csv, truth_csv, keywords_file ? keywords_file : "",
        to_eval_options(options));
    fill_eval_result(summary, result);
  });
}

ctcspot_status ctcspot_stream_open(const char* path,
                                   ctcspot_stream_reader** out) {
  if (!path || !out) return fail(CTCSPOT_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<ctcspot_stream_reader>();
    handle->impl = std::make_unique<StreamReader>(path);
    *out = handle.release();
  });
}

void ctcspot_stream_close(ctcspot_stream_reader* reader) { delete reader; }

int ctcspot_stream_kind(const ctcspot_stream_reader* reader) {
  return reader ? static_cast<int>(reader->impl->kind()) : -1;
}

int ctcspot_stream_dim(const ctcspot_stream_reader* reader) {
  return reader ? reader->impl->dim() : 0;
}

double ctcspot_stream_frame_period_ms(const ctcspot_stream_reader* reader) {
  return reader ? reader->impl->frame_period_ms() : 0.0;
}

int64_t ctcspot_stream_frame_count(const ctcspot_stream_reader* reader) {
  return reader ? reader->impl->frame_count() : 0;
}

size_t ctcspot_stream_read(ctcspot_stream_reader* reader, float* out,
                           size_t max_frames) {
  if (!reader || !out) return 0;
  std::vector<Eigen::VectorXd> frames;
  const size_t n = reader->impl->read_frames(max_frames, &frames);
  const int dim = reader->impl->dim();
  for (size_t t = 0; t < n; ++t) {
    for (int i = 0; i < dim; ++i) {
      out[t * static_cast<size_t>(dim) + i] =
          static_cast<float>(frames[t][i]);
    }
  }
  return n;
}

ctcspot_status ctcspot_stream_writer_create(const char* path, int kind,
                                            int dim, double frame_period_ms,
                                            ctcspot_stream_writer** out) {
  if (!path || !out) return fail(CTCSPOT_EINVAL, "null argument");
  *out = nullptr;
  if (kind < 0 || kind > 2) return fail(CTCSPOT_EINVAL, "unknown stream kind");
  return guarded([&] {
    auto handle = std::make_unique<ctcspot_stream_writer>();
    handle->impl = std::make_unique<StreamWriter>(
        path, static_cast<StreamKind>(kind), dim, frame_period_ms);
    handle->dim = dim;
    *out = handle.release();
  });
}

ctcspot_status ctcspot_stream_write(ctcspot_stream_writer* writer,
                                    const float* frames, size_t frame_count) {
  if (!writer || (!frames && frame_count > 0)) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  return guarded([&] {
    std::vector<double> frame(static_cast<size_t>(writer->dim));
    for (size_t t = 0; t < frame_count; ++t) {
      for (int i = 0; i < writer->dim; ++i) {
        frame[static_cast<size_t>(i)] =
            static_cast<double>(frames[t * static_cast<size_t>(writer->dim) +
                                       static_cast<size_t>(i)]);
      }
      writer->impl->write_frame(frame);
    }
  });
}

ctcspot_status ctcspot_stream_writer_close(ctcspot_stream_writer* writer) {
  if (!writer) return fail(CTCSPOT_EINVAL, "null argument");
  const ctcspot_status status = guarded([&] { writer->impl->close(); });
  delete writer;
  return status;
}

ctcspot_status ctcspot_wav_read(const char* path, float** samples,
                                size_t* count, int* sample_rate) {
  if (!path || !samples || !count || !sample_rate) {
    return fail(CTCSPOT_EINVAL, "null argument");
  }
  *samples = nullptr;
  *count = 0;
  return guarded([&] {
    wav::Audio audio = wav::read(path);
    float* buf =
        static_cast<float*>(std::malloc(sizeof(float) * audio.samples.size()));
    if (!buf) throw DataError("out of memory");
    for (size_t i = 0; i < audio.samples.size(); ++i) {
      buf[i] = static_cast<float>(audio.samples[i]);
    }
    *samples = buf;
    *count = audio.samples.size();
    *sample_rate = audio.sample_rate;
  });
}

void ctcspot_free(void* ptr) { std::free(ptr); }

ctcspot_status ctcspot_keywords_load(const char* path,
                                     ctcspot_keywords** out) {
  if (!path || !out) return fail(CTCSPOT_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<ctcspot_keywords>();
    handle->items = corpus_io::read_keyword_list(path);
    *out = handle.release();
  });
}

size_t ctcspot_keywords_count(const ctcspot_keywords* keywords) {
  return keywords ? keywords->items.size() : 0;
}

const char* ctcspot_keywords_get(const ctcspot_keywords* keywords,
                                 size_t index) {
  if (!keywords || index >= keywords->items.size()) return nullptr;
  return keywords->items[index].c_str();
}

void ctcspot_keywords_free(ctcspot_keywords* keywords) { delete keywords; }

}  // extern "C"
