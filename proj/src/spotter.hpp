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

#ifndef CTCSPOT_SPOTTER_HPP
#define CTCSPOT_SPOTTER_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "decoder.hpp"
#include "features.hpp"
#include "model_io.hpp"

namespace ctcspot {
namespace spot {

enum class Mode { kKeywordOnly, kFiller };

struct SpotterOptions {
  Mode mode = Mode::kKeywordOnly;
  kws::Semantics semantics = kws::Semantics::kSum;
  double per_char_threshold = 1.0;
  int refractory = 30;  // frames
};

// One streaming spotting session. Input can arrive as raw 16 kHz audio,
// feature frames, or label posteriors (decoder-only); memory is constant
// in the stream length. One instance per stream, single writer; the model
// is shared and immutable.
class Spotter {
 public:
  Spotter(std::shared_ptr<const Model> model,
          const std::vector<std::string>& keywords,
          const SpotterOptions& options);

  void feed_audio(std::span<const double> samples);
  void feed_features(std::span<const net::Vec> frames);
  void feed_posteriors(std::span<const net::Vec> frames);
  // Flushes the feature lookahead and closes open detection regions.
  void finish();
  void reset();

  std::vector<kws::DetectionEvent> take_events();
  long frames_seen() const { return frames_; }
  const std::vector<std::string>& keywords() const { return keywords_; }
  const SpotterOptions& options() const { return options_; }

  // Called once per frame with the per-keyword detection scores.
  using ScoreCallback = std::function<void(long, std::span<const double>)>;
  void set_score_callback(ScoreCallback cb) { score_cb_ = std::move(cb); }

 private:
  void process_posterior(const net::Vec& posterior);

  std::shared_ptr<const Model> model_;
  std::vector<std::string> keywords_;
  SpotterOptions options_;
  std::vector<kws::KeywordOnlyDecoder> keyword_only_;
  std::unique_ptr<kws::KeywordFillerDecoder> filler_;
  std::vector<kws::DetectionTracker> trackers_;
  features::StreamingExtractor extractor_{features::kSampleRate};
  net::StreamState net_state_;
  std::vector<kws::DetectionEvent> pending_;
  std::vector<double> scores_;
  ScoreCallback score_cb_;
  long frames_ = 0;
  bool finished_ = false;
};

}  // namespace spot
}  // namespace ctcspot

#endif  // CTCSPOT_SPOTTER_HPP
