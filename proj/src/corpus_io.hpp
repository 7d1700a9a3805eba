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

#ifndef CTCSPOT_CORPUS_IO_HPP
#define CTCSPOT_CORPUS_IO_HPP

#include <string>
#include <vector>

#include "alphabet.hpp"
#include "synth.hpp"
#include "train.hpp"

namespace ctcspot {
namespace corpus_io {

// Corpus directory layout:
//   manifest.csv      id,split,frames,transcript,file
//   utt/<id>.kws      per-utterance feature streams
//   eval_stream.kws   all eval utterances concatenated
//   truth.csv         keyword,utterance,end_frame (global eval frames)
//   keywords_long.txt / keywords_short.txt
//   corpus.meta       feature dim and frame period

struct ManifestRow {
  std::string id;
  std::string split;  // "train" or "eval"
  long frames = 0;
  std::string transcript;
  std::string file;  // relative stream path
};

struct TruthRow {
  std::string keyword;
  std::string utterance;
  long end_frame = 0;
};

void write_corpus(const std::string& dir, const synth::Corpus& train_corpus,
                  const synth::Corpus& eval_corpus,
                  const synth::CorpusConfig& config,
                  const std::vector<std::string>& keywords_long,
                  const std::vector<std::string>& keywords_short);

std::vector<ManifestRow> read_manifest(const std::string& dir);

// Utterances of one split with raw (unnormalized) features.
std::vector<train::Utterance> load_split(const std::string& dir,
                                         const std::string& split,
                                         const Alphabet& alphabet);

void write_truth(const std::string& path, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth(const std::string& path);

// One keyword per line; '#' starts a comment, blank lines are skipped.
std::vector<std::string> read_keyword_list(const std::string& path);

}  // namespace corpus_io
}  // namespace ctcspot

#endif  // CTCSPOT_CORPUS_IO_HPP
