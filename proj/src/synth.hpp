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

#ifndef CTCSPOT_SYNTH_HPP
#define CTCSPOT_SYNTH_HPP

#include <string>
#include <vector>

#include "alphabet.hpp"
#include "net.hpp"

namespace ctcspot {
namespace synth {

// Synthetic speech: every character owns a fixed template vector; an
// utterance emits each character's template for a few frames plus white
// noise. Short keywords chosen as substrings of longer vocabulary words
// make the detection task genuinely ambiguous, longer keywords stay easy.
struct SynthConfig {
  int feature_dim = 16;
  int mean_duration = 3;     // frames per character
  int duration_jitter = 1;   // d ~ uniform[mean - jitter, mean + jitter]
  double separation = 1.0;   // template vector norm
  double noise_std = 0.4;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CharSpan {
  int label = 0;
  long start = 0;  // [start, end)
  long end = 0;
};

struct AlignedUtterance {
  std::string id;
  std::string text;  // transcript, '_' for word boundaries
  std::vector<net::Vec> frames;
  LabelSequence labels;
  std::vector<CharSpan> spans;  // one per transcript character, tiling
};

// Deterministic template for a label under this config (independent of
// generation order).
net::Vec label_template(const SynthConfig& config, int label);

// One utterance from its transcript; duration and noise draws come from
// `rng`. The convenience overload derives the stream from config.seed.
AlignedUtterance synth_utterance(const std::string& text,
                                 const SynthConfig& config,
                                 const Alphabet& alphabet, Rng& rng);
AlignedUtterance synth_utterance(const std::string& text,
                                 const SynthConfig& config,
                                 const Alphabet& alphabet);

// A word occurrence inside a corpus, end frame local to its utterance.
struct Occurrence {
  std::string word;
  int utterance = 0;
  long end_frame = 0;  // last frame of the word's last character
};

struct CorpusConfig {
  SynthConfig synth;
  std::vector<std::string> vocabulary;
  int sentences = 200;
  int min_words = 3;
  int max_words = 10;

  void validate() const;
};

struct Corpus {
  std::vector<AlignedUtterance> utterances;
  std::vector<Occurrence> occurrences;
};

// Random sentences of min..max vocabulary words with word-boundary spans
// between, before and after the words (the boundary stands in for the
// pauses real speech would carry). `stream_id` separates independent
// corpora (train vs evaluation) under one seed.
Corpus build_corpus(const CorpusConfig& config, const Alphabet& alphabet,
                    std::uint64_t stream_id);

// Built-in vocabulary. The short keywords are substrings of several longer
// vocabulary words (word-initial, word-final and interior), so spotting
// them requires the word-boundary evidence; the long keywords have no such
// traps.
struct DefaultVocab {
  std::vector<std::string> words;
  std::vector<std::string> keywords_long;   // multisyllabic analog
  std::vector<std::string> keywords_short;  // monosyllabic analog
};
const DefaultVocab& default_vocabulary();

}  // namespace synth
}  // namespace ctcspot

#endif  // CTCSPOT_SYNTH_HPP
