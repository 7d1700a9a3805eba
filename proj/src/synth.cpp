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

#include "synth.hpp"

namespace ctcspot {
namespace synth {

void SynthConfig::validate() const {
  if (feature_dim <= 0) throw InvalidArgument("synth: feature_dim must be > 0");
  if (mean_duration < 2) {
    throw InvalidArgument("synth: mean character duration must be >= 2");
  }
  if (duration_jitter < 0 || duration_jitter >= mean_duration) {
    throw InvalidArgument("synth: jitter must be in [0, mean_duration)");
  }
  if (noise_std < 0.0) throw InvalidArgument("synth: noise_std must be >= 0");
  if (separation <= 0.0) throw InvalidArgument("synth: separation must be > 0");
}

net::Vec label_template(const SynthConfig& config, int label) {
  // template streams live far away from the sentence/noise fork ids
  Rng rng = Rng(config.seed).fork(1000000 + static_cast<std::uint64_t>(label));
  net::Vec v(config.feature_dim);
  for (int i = 0; i < config.feature_dim; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  return norm > 0 ? net::Vec(v * (config.separation / norm)) : v;
}

AlignedUtterance synth_utterance(const std::string& text,
                                 const SynthConfig& config,
                                 const Alphabet& alphabet, Rng& rng) {
  config.validate();
  AlignedUtterance utt;
  utt.text = text;
  utt.labels = alphabet.encode(text);

  long frame = 0;
  for (std::size_t i = 0; i < utt.labels.size(); ++i) {
    const int label = utt.labels[i];
    const net::Vec tmpl = label_template(config, label);
    const int duration = static_cast<int>(
        rng.uniform_int(config.mean_duration - config.duration_jitter,
                        config.mean_duration + config.duration_jitter));
    CharSpan span{label, frame, frame + duration};
    for (int d = 0; d < duration; ++d) {
      net::Vec f = tmpl;
      if (config.noise_std > 0.0) {
        for (int k = 0; k < config.feature_dim; ++k) {
          f[k] += config.noise_std * rng.normal();
        }
      }
      utt.frames.push_back(std::move(f));
    }
    frame += duration;
    utt.spans.push_back(span);
  }
  return utt;
}

AlignedUtterance synth_utterance(const std::string& text,
                                 const SynthConfig& config,
                                 const Alphabet& alphabet) {
  Rng rng(config.seed);
  return synth_utterance(text, config, alphabet, rng);
}

void CorpusConfig::validate() const {
  synth.validate();
  if (vocabulary.empty()) throw InvalidArgument("corpus: empty vocabulary");
  if (sentences <= 0) throw InvalidArgument("corpus: need sentences > 0");
  if (min_words < 1 || max_words < min_words) {
    throw InvalidArgument("corpus: need 1 <= min_words <= max_words");
  }
}

Corpus build_corpus(const CorpusConfig& config, const Alphabet& alphabet,
                    std::uint64_t stream_id) {
  config.validate();
  Rng master(config.synth.seed);
  Rng sentence_rng = master.fork(2 * stream_id);
  Rng noise_rng = master.fork(2 * stream_id + 1);

  Corpus corpus;
  for (int s = 0; s < config.sentences; ++s) {
    const int n_words = static_cast<int>(
        sentence_rng.uniform_int(config.min_words, config.max_words));
    std::vector<const std::string*> words;
    std::string text = "_";
    for (int w = 0; w < n_words; ++w) {
      const auto& word = config.vocabulary[static_cast<std::size_t>(
          sentence_rng.uniform_index(config.vocabulary.size()))];
      words.push_back(&word);
      text += word;
      text += '_';
    }

    AlignedUtterance utt =
        synth_utterance(text, config.synth, alphabet, noise_rng);
    utt.id = (stream_id == 0 ? "train" : "eval") + std::string("_") +
             std::to_string(s);

    // word k's characters sit at text positions [pos, pos + len)
    std::size_t pos = 1;
    for (const std::string* word : words) {
      const std::size_t last_char = pos + word->size() - 1;
      corpus.occurrences.push_back(
          {*word, s, utt.spans[last_char].end - 1});
      pos += word->size() + 1;
    }
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

const DefaultVocab& default_vocabulary() {
  static const DefaultVocab vocab = [] {
    DefaultVocab v;
    v.keywords_long = {"lantern", "monsoon", "crimson", "catalog",
                       "antenna", "voyager", "hexagon"};
    v.keywords_short = {"ant", "mon", "cat", "son", "ten", "era"};
    // container words embed every short keyword at word starts, ends and
    // interiors ("mason" ends with "son", "anthem" starts with "ant", ...)
    const std::vector<std::string> containers = {
        "camera", "montage", "mason",  "anthem", "catnip",
        "sonnet", "tomcat",  "patent", "mantis", "canton",
        "lemon",  "rotten",  "tennis", "eraser"};
    const std::vector<std::string> fillers = {"fox", "grid", "plum"};
    v.words = v.keywords_long;
    v.words.insert(v.words.end(), v.keywords_short.begin(),
                   v.keywords_short.end());
    v.words.insert(v.words.end(), containers.begin(), containers.end());
    v.words.insert(v.words.end(), fillers.begin(), fillers.end());
    return v;
  }();
  return vocab;
}

}  // namespace synth
}  // namespace ctcspot
