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

#include "spotter.hpp"

#include <cmath>

namespace ctcspot {
namespace spot {

Spotter::Spotter(std::shared_ptr<const Model> model,
                 const std::vector<std::string>& keywords,
                 const SpotterOptions& options)
    : model_(std::move(model)), keywords_(keywords), options_(options) {
  if (!model_) throw InvalidArgument("spotter: null model");
  if (keywords_.empty()) throw InvalidArgument("spotter: no keywords");
  if (options_.mode == Mode::kFiller &&
      options_.semantics == kws::Semantics::kSum) {
    throw InvalidArgument(
        "spotter: sum semantics is undefined for the keyword-filler model "
        "(merged paths carry different label histories)");
  }
  if (options_.refractory < 0) {
    throw InvalidArgument("spotter: refractory must be >= 0");
  }

  const Alphabet& alpha = model_->alphabet;
  std::vector<kws::KeywordNetwork> networks;
  for (const auto& kw : keywords_) {
    networks.push_back(
        kws::build_keyword_network(kw, alpha, options_.per_char_threshold));
    trackers_.emplace_back(-networks.back().threshold, options_.refractory);
  }
  if (options_.mode == Mode::kFiller) {
    filler_ = std::make_unique<kws::KeywordFillerDecoder>(std::move(networks),
                                                          alpha);
  } else {
    for (auto& net : networks) {
      keyword_only_.emplace_back(std::move(net), alpha, options_.semantics);
    }
  }
  net_state_ = net::StreamState::zero(model_->config);
  scores_.resize(keywords_.size());
}

void Spotter::process_posterior(const net::Vec& posterior) {
  if (posterior.size() != model_->alphabet.size()) {
    throw DataError("spotter: posterior dimension mismatch");
  }
  const double sum = posterior.sum();
  if (std::abs(sum - 1.0) > 1e-3 || posterior.minCoeff() < -1e-6) {
    throw DataError("spotter: posterior frame is not normalized");
  }

  if (filler_) {
    auto out = filler_->step(posterior);
    for (std::size_t k = 0; k < scores_.size(); ++k) {
      scores_[k] = out.statistic[k];
    }
  } else {
    for (std::size_t k = 0; k < scores_.size(); ++k) {
      scores_[k] = keyword_only_[k].step(posterior);
    }
  }

  if (score_cb_) score_cb_(frames_, scores_);
  for (std::size_t k = 0; k < scores_.size(); ++k) {
    if (auto ev = trackers_[k].feed(frames_, scores_[k])) {
      ev->keyword = static_cast<int>(k);
      pending_.push_back(*ev);
    }
  }
  ++frames_;
}

void Spotter::feed_audio(std::span<const double> samples) {
  if (model_->config.input_dim != features::kFeatureDim) {
    throw DataError(
        "spotter: this model does not take audio (input dimension is not "
        "the audio feature dimension)");
  }
  auto frames = extractor_.feed(samples.data(), samples.size());
  feed_features(frames);
}

void Spotter::feed_features(std::span<const net::Vec> frames) {
  for (const net::Vec& raw : frames) {
    if (raw.size() != model_->config.input_dim) {
      throw DataError("spotter: feature dimension mismatch");
    }
    const net::Vec normalized = features::normalize_frame(raw, model_->stats);
    process_posterior(
        net::forward_frame(model_->params, normalized, &net_state_));
  }
}

void Spotter::feed_posteriors(std::span<const net::Vec> frames) {
  for (const net::Vec& frame : frames) process_posterior(frame);
}

void Spotter::finish() {
  if (finished_) return;
  auto tail = extractor_.finish();
  feed_features(tail);
  finished_ = true;
  for (std::size_t k = 0; k < trackers_.size(); ++k) {
    if (auto ev = trackers_[k].finish()) {
      ev->keyword = static_cast<int>(k);
      pending_.push_back(*ev);
    }
  }
}

void Spotter::reset() {
  for (auto& dec : keyword_only_) dec.reset();
  if (filler_) filler_->reset();
  for (auto& tracker : trackers_) tracker.reset();
  extractor_.reset();
  net_state_ = net::StreamState::zero(model_->config);
  pending_.clear();
  frames_ = 0;
  finished_ = false;
}

std::vector<kws::DetectionEvent> Spotter::take_events() {
  std::vector<kws::DetectionEvent> out;
  out.swap(pending_);
  return out;
}

}  // namespace spot
}  // namespace ctcspot
