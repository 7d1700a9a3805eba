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

#ifndef CTCSPOT_PIPELINE_HPP
#define CTCSPOT_PIPELINE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eval.hpp"
#include "model_io.hpp"
#include "spotter.hpp"
#include "synth.hpp"
#include "train.hpp"

namespace ctcspot {
namespace pipeline {

// Everything the command-line front end does, one function per subcommand.

struct SynthOptions {
  synth::SynthConfig synth;
  int train_sentences = 200;
  int eval_sentences = 120;
  int min_words = 3;
  int max_words = 10;
  std::string vocab_file;  // optional; defaults to the built-in vocabulary
};

void synth_run(const SynthOptions& options, const std::string& out_dir);

struct TrainRunOptions {
  std::vector<int> layer_sizes = {32, 32, 32};
  int unroll_length = 128;
  int update_period = 64;
  double learning_rate = 0.2;
  double momentum = 0.9;
  double grad_clip = 1.0;
  int max_updates = 2000;
  std::uint64_t seed = 1;
  int anneal_interval = 0;
  int max_anneals = 6;
  double validation_fraction = 0.05;
  std::function<void(const train::LossPoint&)> on_update;
};

struct TrainRunSummary {
  int updates = 0;
  double final_loss = 0.0;
  int segments_trained = 0;
  int segments_skipped = 0;
  bool early_stopped = false;
};

TrainRunSummary train_run(const TrainRunOptions& options,
                          const std::string& corpus_dir,
                          const std::string& model_path,
                          const std::string& loss_log_path);

struct SpotFileOptions {
  spot::SpotterOptions spotter;
  int chunk_frames = 4096;  // I/O block size; results are independent of it
};

struct SpotFileSummary {
  long frames = 0;
  int events = 0;
};

// Streams a WAV file or a feature/posterior stream file through the
// spotter; writes the detections CSV and, optionally, the per-frame score
// stream (kind `scores`, one column per keyword in list order).
SpotFileSummary spot_file(const Model& model, const std::string& input_path,
                          const std::vector<std::string>& keywords,
                          const SpotFileOptions& options,
                          const std::string& detections_csv,
                          const std::string& scores_path = "");

struct EvalOptions {
  int match_window = 50;  // frames
  int refractory = 30;
  double sweep_lo = 0.0;
  double sweep_hi = 6.0;
  int sweep_steps = 50;
};

struct EvalSummary {
  double max_f1 = 0.0;
  double best_threshold = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::optional<eval::LatencyStats> latency;  // at the best threshold
};

// Threshold sweep over a score stream (written by spot_file).
EvalSummary eval_scores(const std::string& scores_path,
                        const std::string& keywords_path,
                        const std::string& truth_path,
                        const EvalOptions& options,
                        const std::string& pr_csv_path = "");

// Fixed operating point from a detections CSV. When a keyword list is
// given, truth rows outside it are ignored (the truth table lists every
// vocabulary word).
EvalSummary eval_detections(const std::string& detections_csv,
                            const std::string& truth_path,
                            const std::string& keywords_path,
                            const EvalOptions& options);

std::vector<double> linspace(double lo, double hi, int steps);

}  // namespace pipeline
}  // namespace ctcspot

#endif  // CTCSPOT_PIPELINE_HPP
