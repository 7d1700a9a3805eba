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

#ifndef CTCSPOT_TRAIN_HPP
#define CTCSPOT_TRAIN_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "alphabet.hpp"
#include "net.hpp"

namespace ctcspot {
namespace train {

struct Utterance {
  std::string id;
  std::vector<net::Vec> frames;  // already normalized for training
  LabelSequence labels;
};

// A labeled frame range inside an unrolled window, [start, end).
struct Segment {
  int start = 0;
  int end = 0;
  LabelSequence labels;
};

struct WindowGradient {
  net::NetworkParams grads;  // d (loss_sum / label_count) / d params
  double loss_sum = 0.0;
  long label_count = 0;
  int segments_used = 0;
  int segments_infeasible = 0;
};

// CTC loss over every segment of the window plus one truncated-BPTT pass.
// Infeasible segments (target longer than the frame span allows) are
// counted and skipped. The gradient is normalized per target label.
WindowGradient window_gradient(const net::NetworkParams& params,
                               std::span<const net::Vec> frames,
                               const net::StreamState& initial,
                               const std::vector<Segment>& segments,
                               int blank);

// Loss (per label) of one utterance from a zero initial state; full-length
// forward, no truncation. Used for validation and as a test oracle.
double utterance_loss(const net::NetworkParams& params,
                      const net::NetworkConfig& config, const Utterance& utt,
                      int blank);

struct LossPoint {
  int update = 0;
  double loss_per_label = 0.0;
  double learning_rate = 0.0;
  int segments = 0;
};

struct TrainOptions {
  int max_updates = 2000;
  // validation cadence for annealing; 0 disables annealing/early stop
  int anneal_interval = 0;
  double anneal_factor = 0.5;
  int max_anneals = 6;
  double min_improvement = 1e-4;
  // word-boundary label appended between concatenated transcripts (skipped
  // when a transcript already ends with the boundary)
  bool insert_boundary = true;
  std::uint64_t stream_seed = 1;
  std::function<void(const LossPoint&)> on_update;
};

struct TrainResult {
  net::NetworkParams params;
  std::vector<LossPoint> loss_log;
  int updates = 0;
  long frames_consumed = 0;
  int segments_trained = 0;
  int segments_skipped = 0;  // never fit a window, or infeasible
  int anneals = 0;
  bool early_stopped = false;
};

// Truncated-BPTT training on an endless stream built by randomly
// concatenating corpus utterances. CTC loss is applied to each utterance
// segment the first time it lies fully inside the unroll window; recurrent
// state is carried across windows. SGD with momentum and global-norm
// clipping. Throws DivergenceError when the loss or weights go non-finite.
TrainResult train_stream(const net::NetworkConfig& config,
                         net::NetworkParams initial,
                         const std::vector<Utterance>& corpus,
                         const std::vector<Utterance>& validation,
                         int blank, int boundary, const TrainOptions& options);

}  // namespace train
}  // namespace ctcspot

#endif  // CTCSPOT_TRAIN_HPP
