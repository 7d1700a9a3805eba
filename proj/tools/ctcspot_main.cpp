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

// Command-line front end. Links the C engine API only.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ctcspot.h"

namespace {

// exit codes: 0 ok, 1 usage, 2 data/format, 3 numerical divergence
int status_to_exit(ctcspot_status status) { return static_cast<int>(status); }

int fail(ctcspot_status status) {
  std::fprintf(stderr, "error (%s): %s\n", ctcspot_status_name(status),
               ctcspot_last_error());
  return status_to_exit(status);
}

uint64_t seed_or_env(CLI::Option* opt, uint64_t value) {
  if (opt->count() > 0) return value;
  if (const char* env = std::getenv("KWS_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return value;
}

struct SpotFlags {
  std::string model;
  std::string input;
  std::string keywords;
  std::string out;
  std::string scores;
  std::string mode = "keyword-only";
  std::string semantics = "sum";
  double threshold_per_char = 1.0;
  int refractory = 30;
  int chunk_frames = 4096;
};

bool parse_sweep(const std::string& spec, ctcspot_eval_options* opts) {
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 ||
      steps < 1) {
    return false;
  }
  opts->sweep_lo = lo;
  opts->sweep_hi = hi;
  opts->sweep_steps = steps;
  return true;
}

void progress_cb(void*, int update, double loss, double lr) {
  if (update == 1 || update % 100 == 0) {
    std::fprintf(stderr, "update %6d  loss/label %.4f  lr %.5f\n", update,
                 loss, lr);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctcspot: streaming character-level keyword spotting"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic training/evaluation corpus");
  ctcspot_synth_options sopts;
  ctcspot_synth_options_init(&sopts);
  std::string synth_out, vocab_file;
  uint64_t synth_seed = sopts.seed;
  synth->add_option("--out", synth_out, "output corpus directory")
      ->required();
  auto* synth_seed_opt =
      synth->add_option("--seed", synth_seed, "generation seed");
  synth->add_option("--sentences", sopts.train_sentences,
                    "training sentences");
  synth->add_option("--eval-sentences", sopts.eval_sentences,
                    "evaluation sentences");
  synth->add_option("--feature-dim", sopts.feature_dim, "feature dimension");
  synth->add_option("--mean-duration", sopts.mean_duration,
                    "frames per character");
  synth->add_option("--duration-jitter", sopts.duration_jitter,
                    "duration jitter (frames)");
  synth->add_option("--noise-std", sopts.noise_std, "noise level");
  synth->add_option("--separation", sopts.separation,
                    "character template norm");
  synth->add_option("--min-words", sopts.min_words, "minimum sentence words");
  synth->add_option("--max-words", sopts.max_words, "maximum sentence words");
  synth->add_option("--vocab", vocab_file,
                    "custom vocabulary file (one word per line)");

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a model on a corpus");
  ctcspot_train_options topts;
  ctcspot_train_options_init(&topts);
  std::string corpus_dir, model_out, loss_log, layers = "32,32,32";
  uint64_t train_seed = topts.seed;
  bool quiet = false;
  train->add_option("--corpus", corpus_dir, "corpus directory")->required();
  train->add_option("--model", model_out, "output model path")->required();
  train->add_option("--loss-log", loss_log, "per-update loss CSV");
  train->add_option("--layers", layers, "LSTM sizes, e.g. 32,32,32");
  train->add_option("--unroll", topts.unroll_length, "unroll window frames");
  train->add_option("--update-period", topts.update_period,
                    "frames between updates");
  train->add_option("--lr", topts.learning_rate, "learning rate");
  train->add_option("--momentum", topts.momentum, "SGD momentum");
  train->add_option("--clip", topts.grad_clip, "gradient norm cap");
  train->add_option("--updates", topts.max_updates, "weight update budget");
  auto* train_seed_opt = train->add_option("--seed", train_seed, "seed");
  train->add_option("--anneal-interval", topts.anneal_interval,
                    "updates between validation checks (0 = off)");
  train->add_option("--max-anneals", topts.max_anneals,
                    "stop after this many learning-rate halvings");
  train->add_option("--validation-fraction", topts.validation_fraction,
                    "held-out fraction for annealing");
  train->add_flag("--quiet", quiet, "suppress progress lines");

  // ---- spot ----
  auto* spot = app.add_subcommand(
      "spot", "stream audio/features/posteriors and detect keywords");
  SpotFlags sf;
  spot->add_option("--model", sf.model, "model file")->required();
  spot->add_option("--input", sf.input, "WAV or stream file")->required();
  spot->add_option("--keywords", sf.keywords, "keyword list file")
      ->required();
  spot->add_option("--out", sf.out, "detections CSV")->required();
  spot->add_option("--scores", sf.scores, "optional per-frame score stream");
  spot->add_option("--mode", sf.mode, "keyword-only|filler")
      ->check(CLI::IsMember({"keyword-only", "filler"}));
  spot->add_option("--semantics", sf.semantics, "sum|max")
      ->check(CLI::IsMember({"sum", "max"}));
  spot->add_option("--threshold-per-char", sf.threshold_per_char,
                   "detection threshold per keyword character");
  spot->add_option("--refractory", sf.refractory,
                   "frames a detection region may dip before closing");
  spot->add_option("--chunk-frames", sf.chunk_frames,
                   "I/O block size (does not change results)");

  // ---- eval ----
  auto* eval = app.add_subcommand(
      "eval", "score detections or sweep thresholds over score streams");
  ctcspot_eval_options eopts;
  ctcspot_eval_options_init(&eopts);
  std::string detections_csv, scores_path, eval_keywords, truth_csv, pr_out;
  std::string sweep_spec;
  eval->add_option("--detections", detections_csv,
                   "detections CSV (fixed operating point)");
  eval->add_option("--scores", scores_path,
                   "score stream (threshold sweep mode)");
  eval->add_option("--keywords", eval_keywords, "keyword list file");
  eval->add_option("--truth", truth_csv, "ground-truth table")->required();
  eval->add_option("--sweep", sweep_spec,
                   "per-char threshold sweep lo:hi:steps");
  eval->add_option("--match-window", eopts.match_window,
                   "matching tolerance in frames");
  eval->add_option("--refractory", eopts.refractory, "detector refractory");
  eval->add_option("--pr-out", pr_out, "PR curve CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage problems exit 1, --help exits 0
  }

  if (synth->parsed()) {
    sopts.seed = seed_or_env(synth_seed_opt, synth_seed);
    if (!vocab_file.empty()) sopts.vocab_file = vocab_file.c_str();
    const ctcspot_status rc = ctcspot_synth_run(&sopts, synth_out.c_str());
    if (rc != CTCSPOT_OK) return fail(rc);
    std::printf("corpus written to %s\n", synth_out.c_str());
    return 0;
  }

  if (train->parsed()) {
    topts.layer_sizes = layers.c_str();
    topts.seed = seed_or_env(train_seed_opt, train_seed);
    if (!quiet) topts.on_update = progress_cb;
    const ctcspot_status rc =
        ctcspot_train_run(&topts, corpus_dir.c_str(), model_out.c_str(),
                          loss_log.empty() ? nullptr : loss_log.c_str());
    if (rc != CTCSPOT_OK) return fail(rc);
    std::printf("model written to %s\n", model_out.c_str());
    return 0;
  }

  if (spot->parsed()) {
    ctcspot_spotter_options popts;
    ctcspot_spotter_options_init(&popts);
    popts.mode = sf.mode == "filler" ? CTCSPOT_MODE_FILLER
                                     : CTCSPOT_MODE_KEYWORD_ONLY;
    popts.semantics = sf.semantics == "max" ? CTCSPOT_SEMANTICS_MAX
                                            : CTCSPOT_SEMANTICS_SUM;
    popts.per_char_threshold = sf.threshold_per_char;
    popts.refractory = sf.refractory;

    ctcspot_model* model = nullptr;
    ctcspot_status rc = ctcspot_model_load(sf.model.c_str(), &model);
    if (rc != CTCSPOT_OK) return fail(rc);
    ctcspot_keywords* keywords = nullptr;
    rc = ctcspot_keywords_load(sf.keywords.c_str(), &keywords);
    if (rc != CTCSPOT_OK) {
      ctcspot_model_free(model);
      return fail(rc);
    }
    std::vector<const char*> kw;
    for (size_t i = 0; i < ctcspot_keywords_count(keywords); ++i) {
      kw.push_back(ctcspot_keywords_get(keywords, i));
    }
    rc = ctcspot_spot_file(model, sf.input.c_str(), kw.data(), kw.size(),
                           &popts, sf.chunk_frames, sf.out.c_str(),
                           sf.scores.empty() ? nullptr : sf.scores.c_str());
    ctcspot_keywords_free(keywords);
    ctcspot_model_free(model);
    if (rc != CTCSPOT_OK) return fail(rc);
    std::printf("detections written to %s\n", sf.out.c_str());
    return 0;
  }

  if (eval->parsed()) {
    if (!sweep_spec.empty() && !parse_sweep(sweep_spec, &eopts)) {
      std::fprintf(stderr, "error: bad --sweep spec (want lo:hi:steps)\n");
      return 1;
    }
    if (detections_csv.empty() == scores_path.empty()) {
      std::fprintf(stderr,
                   "error: pass exactly one of --detections or --scores\n");
      return 1;
    }
    ctcspot_eval_result result;
    ctcspot_status rc;
    if (!scores_path.empty()) {
      if (eval_keywords.empty()) {
        std::fprintf(stderr, "error: --scores mode needs --keywords\n");
        return 1;
      }
      rc = ctcspot_eval_scores(scores_path.c_str(), eval_keywords.c_str(),
                               truth_csv.c_str(), &eopts,
                               pr_out.empty() ? nullptr : pr_out.c_str(),
                               &result);
    } else {
      rc = ctcspot_eval_detections(
          detections_csv.c_str(), truth_csv.c_str(),
          eval_keywords.empty() ? nullptr : eval_keywords.c_str(), &eopts,
          &result);
    }
    if (rc != CTCSPOT_OK) return fail(rc);

    if (!scores_path.empty()) {
      std::printf("max-F1 %.4f at threshold/char %.4f\n", result.max_f1,
                  result.best_threshold);
    } else {
      std::printf("F1 %.4f\n", result.max_f1);
    }
    std::printf("tp %d  fp %d  fn %d\n", result.tp, result.fp, result.fn);
    if (result.latency_count > 0) {
      std::printf(
          "latency over %d matches: median %.0f ms  mean %.1f ms  max %.0f "
          "ms\n",
          result.latency_count, result.latency_median_ms,
          result.latency_mean_ms, result.latency_max_ms);
    } else {
      std::printf("latency: no matched detections\n");
    }
    if (!pr_out.empty()) std::printf("PR curve written to %s\n", pr_out.c_str());
    return 0;
  }

  return 1;
}
