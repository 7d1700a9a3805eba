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

#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "corpus_io.hpp"
#include "stream_file.hpp"
#include "wav.hpp"

namespace ctcspot {
namespace pipeline {

namespace fs = std::filesystem;

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw InvalidArgument("linspace: need at least one step");
  std::vector<double> out;
  if (steps == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < steps; ++i) {
    out.push_back(lo + (hi - lo) * i / (steps - 1));
  }
  return out;
}

void synth_run(const SynthOptions& options, const std::string& out_dir) {
  const Alphabet alphabet = Alphabet::standard();

  std::vector<std::string> vocabulary;
  std::vector<std::string> keywords_long;
  std::vector<std::string> keywords_short;
  if (options.vocab_file.empty()) {
    const auto& v = synth::default_vocabulary();
    vocabulary = v.words;
    keywords_long = v.keywords_long;
    keywords_short = v.keywords_short;
  } else {
    vocabulary = corpus_io::read_keyword_list(options.vocab_file);
    for (const auto& word : vocabulary) {
      if (word.size() >= 6) keywords_long.push_back(word);
      if (word.size() <= 3) keywords_short.push_back(word);
    }
  }

  synth::CorpusConfig config;
  config.synth = options.synth;
  config.vocabulary = vocabulary;
  config.min_words = options.min_words;
  config.max_words = options.max_words;

  config.sentences = options.train_sentences;
  synth::Corpus train_corpus = synth::build_corpus(config, alphabet, 0);
  config.sentences = options.eval_sentences;
  synth::Corpus eval_corpus = synth::build_corpus(config, alphabet, 1);

  fs::create_directories(out_dir);
  corpus_io::write_corpus(out_dir, train_corpus, eval_corpus, config,
                          keywords_long, keywords_short);
}

TrainRunSummary train_run(const TrainRunOptions& options,
                          const std::string& corpus_dir,
                          const std::string& model_path,
                          const std::string& loss_log_path) {
  const Alphabet alphabet = Alphabet::standard();
  auto utterances = corpus_io::load_split(corpus_dir, "train", alphabet);
  if (utterances.empty()) {
    throw DataError("train: corpus has no training utterances: " + corpus_dir);
  }

  // normalizer from the full training set
  features::FrameSequence all_frames;
  for (const auto& utt : utterances) {
    all_frames.insert(all_frames.end(), utt.frames.begin(), utt.frames.end());
  }
  const features::NormalizerStats stats = features::fit_normalizer(all_frames);
  for (auto& utt : utterances) {
    for (auto& f : utt.frames) f = features::normalize_frame(f, stats);
  }

  net::NetworkConfig config;
  config.input_dim = static_cast<int>(utterances[0].frames[0].size());
  config.layer_sizes = options.layer_sizes;
  config.output_dim = alphabet.size();
  config.unroll_length = options.unroll_length;
  config.update_period = options.update_period;
  config.learning_rate = options.learning_rate;
  config.momentum = options.momentum;
  config.grad_clip = options.grad_clip;
  config.seed = options.seed;
  config.validate();

  // hold out the tail as the validation set when annealing is on
  std::vector<train::Utterance> validation;
  if (options.anneal_interval > 0 && utterances.size() > 3) {
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(options.validation_fraction *
                                    static_cast<double>(utterances.size())));
    validation.assign(utterances.end() - keep, utterances.end());
    utterances.resize(utterances.size() - keep);
  }

  Rng rng(options.seed);
  net::NetworkParams params = net::NetworkParams::init(config, rng);

  train::TrainOptions topts;
  topts.max_updates = options.max_updates;
  topts.anneal_interval = options.anneal_interval;
  topts.max_anneals = options.max_anneals;
  topts.stream_seed = options.seed;
  topts.on_update = options.on_update;
  train::TrainResult result =
      train::train_stream(config, std::move(params), utterances, validation,
                          alphabet.blank(), alphabet.boundary(), topts);

  Model model;
  model.config = config;
  model.params = std::move(result.params);
  model.stats = stats;
  model.alphabet = alphabet;
  save_model(model, model_path);

  if (!loss_log_path.empty()) {
    std::ofstream log(loss_log_path);
    if (!log) throw DataError("train: cannot write loss log " + loss_log_path);
    log << "update,loss_per_label,learning_rate,segments\n";
    char buf[96];
    for (const auto& p : result.loss_log) {
      std::snprintf(buf, sizeof buf, "%d,%.8f,%.8f,%d", p.update,
                    p.loss_per_label, p.learning_rate, p.segments);
      log << buf << '\n';
    }
  }

  TrainRunSummary summary;
  summary.updates = result.updates;
  summary.final_loss =
      result.loss_log.empty() ? 0.0 : result.loss_log.back().loss_per_label;
  summary.segments_trained = result.segments_trained;
  summary.segments_skipped = result.segments_skipped;
  summary.early_stopped = result.early_stopped;
  return summary;
}

SpotFileSummary spot_file(const Model& model, const std::string& input_path,
                          const std::vector<std::string>& keywords,
                          const SpotFileOptions& options,
                          const std::string& detections_csv,
                          const std::string& scores_path) {
  if (options.chunk_frames < 1) {
    throw InvalidArgument("spot: chunk_frames must be >= 1");
  }
  auto model_ref = std::shared_ptr<const Model>(&model, [](const Model*) {});
  spot::Spotter spotter(model_ref, keywords, options.spotter);

  std::unique_ptr<StreamWriter> score_writer;
  if (!scores_path.empty()) {
    score_writer = std::make_unique<StreamWriter>(
        scores_path, StreamKind::kScores, static_cast<int>(keywords.size()),
        features::kFramePeriodMs);
    spotter.set_score_callback(
        [&score_writer](long, std::span<const double> scores) {
          score_writer->write_frame(
              std::vector<double>(scores.begin(), scores.end()));
        });
  }

  std::vector<eval::Detection> detections;
  auto drain = [&] {
    for (const auto& ev : spotter.take_events()) {
      detections.push_back({keywords[ev.keyword], ev.frame, ev.score});
    }
  };

  const bool is_wav = input_path.size() > 4 &&
                      input_path.substr(input_path.size() - 4) == ".wav";
  if (is_wav) {
    wav::Audio audio = wav::read(input_path);
    if (audio.sample_rate != features::kSampleRate) {
      throw DataError("spot: WAV must be 16 kHz mono: " + input_path);
    }
    const std::size_t samples_per_chunk =
        static_cast<std::size_t>(options.chunk_frames) * features::kHopSamples;
    for (std::size_t pos = 0; pos < audio.samples.size();
         pos += samples_per_chunk) {
      const std::size_t n =
          std::min(samples_per_chunk, audio.samples.size() - pos);
      spotter.feed_audio({audio.samples.data() + pos, n});
      drain();
    }
  } else {
    StreamReader reader(input_path);
    if (reader.kind() == StreamKind::kScores) {
      throw DataError("spot: input stream holds scores, not features or "
                      "posteriors: " +
                      input_path);
    }
    const bool posterior = reader.kind() == StreamKind::kPosteriors;
    std::vector<net::Vec> chunk;
    while (reader.read_frames(static_cast<std::size_t>(options.chunk_frames),
                              &chunk) > 0) {
      if (posterior) {
        spotter.feed_posteriors(chunk);
      } else {
        spotter.feed_features(chunk);
      }
      chunk.clear();
      drain();
    }
  }
  spotter.finish();
  drain();
  if (score_writer) score_writer->close();

  eval::write_detections_csv(detections_csv, detections,
                             features::kFramePeriodMs);
  SpotFileSummary summary;
  summary.frames = spotter.frames_seen();
  summary.events = static_cast<int>(detections.size());
  return summary;
}

namespace {

EvalSummary summarize(const eval::SweepResult& sweep) {
  EvalSummary summary;
  summary.max_f1 = sweep.max_f1;
  summary.best_threshold = sweep.best_threshold;
  for (const auto& p : sweep.points) {
    if (p.threshold == sweep.best_threshold) {
      summary.tp = p.tp;
      summary.fp = p.fp;
      summary.fn = p.fn;
    }
  }
  summary.latency = eval::latency_stats(sweep.best_latencies);
  return summary;
}

}  // namespace

EvalSummary eval_scores(const std::string& scores_path,
                        const std::string& keywords_path,
                        const std::string& truth_path,
                        const EvalOptions& options,
                        const std::string& pr_csv_path) {
  const auto keywords = corpus_io::read_keyword_list(keywords_path);
  if (keywords.empty()) {
    throw DataError("eval: keyword list is empty: " + keywords_path);
  }
  StreamReader reader(scores_path);
  if (reader.kind() != StreamKind::kScores) {
    throw DataError("eval: stream does not hold scores: " + scores_path);
  }
  if (reader.dim() != static_cast<int>(keywords.size())) {
    throw DataError(
        "eval: score stream width does not match the keyword list");
  }
  std::map<std::string, std::vector<double>> scores;
  for (const auto& kw : keywords) scores[kw];  // fix the column order
  {
    auto frames = reader.read_all();
    for (const auto& frame : frames) {
      for (std::size_t k = 0; k < keywords.size(); ++k) {
        scores[keywords[k]].push_back(frame[static_cast<int>(k)]);
      }
    }
  }

  std::vector<eval::GroundTruth> truth;
  for (const auto& row : corpus_io::read_truth(truth_path)) {
    truth.push_back({row.keyword, row.end_frame});
  }

  eval::SweepResult sweep = eval::pr_sweep(
      scores, truth,
      linspace(options.sweep_lo, options.sweep_hi, options.sweep_steps),
      options.refractory, options.match_window);
  if (!pr_csv_path.empty()) eval::write_pr_csv(pr_csv_path, sweep.points);
  return summarize(sweep);
}

EvalSummary eval_detections(const std::string& detections_csv,
                            const std::string& truth_path,
                            const std::string& keywords_path,
                            const EvalOptions& options) {
  const auto events = eval::read_detections_csv(detections_csv);
  std::vector<eval::GroundTruth> truth;
  // the truth table lists every vocabulary word, so misses are only
  // counted for the keywords the detector was actually running
  std::set<std::string> tested;
  if (!keywords_path.empty()) {
    for (const auto& kw : corpus_io::read_keyword_list(keywords_path)) {
      tested.insert(kw);
    }
  }
  for (const auto& ev : events) {
    if (!tested.empty() && !tested.count(ev.keyword)) {
      throw DataError("eval: detections contain a keyword missing from the "
                      "keyword list: " + ev.keyword);
    }
  }
  for (const auto& row : corpus_io::read_truth(truth_path)) {
    if (tested.empty() || tested.count(row.keyword)) {
      truth.push_back({row.keyword, row.end_frame});
    }
  }

  eval::MatchResult match =
      eval::match_detections(events, truth, options.match_window);
  EvalSummary summary;
  summary.tp = match.tp;
  summary.fp = match.fp;
  summary.fn = match.fn;
  const double precision =
      match.tp + match.fp > 0
          ? static_cast<double>(match.tp) / (match.tp + match.fp)
          : 1.0;
  const double recall =
      match.tp + match.fn > 0
          ? static_cast<double>(match.tp) / (match.tp + match.fn)
          : 1.0;
  summary.max_f1 = eval::f1_score(precision, recall);
  summary.latency = eval::latency_stats(match.latencies);
  return summary;
}

}  // namespace pipeline
}  // namespace ctcspot
