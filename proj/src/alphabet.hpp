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

#ifndef CTCSPOT_ALPHABET_HPP
#define CTCSPOT_ALPHABET_HPP

#include <string>
#include <vector>

namespace ctcspot {

// A sequence of non-blank label indices (a transcription).
using LabelSequence = std::vector<int>;

// Ordered label set. The default set has 30 labels: the 26 letters,
// apostrophe, period, the word-boundary label '_' and the blank '-'.
// Indices are stable; blank and boundary are tracked explicitly.
class Alphabet {
 public:
  Alphabet(std::vector<char> labels, int blank_index, int boundary_index);

  // a..z, '\'', '.', '_', '-'; blank last.
  static Alphabet standard();

  int size() const { return static_cast<int>(labels_.size()); }
  int blank() const { return blank_index_; }
  int boundary() const { return boundary_index_; }

  char label_char(int index) const;
  // -1 when the character is not in the alphabet.
  int index_of(char c) const;

  // Transcription string -> label indices. Lowercases letters; every
  // character must be a non-blank label. Throws InvalidArgument otherwise.
  LabelSequence encode(const std::string& text) const;
  std::string decode(const LabelSequence& seq) const;

  // Keyword text -> label indices: lowercased, and additionally rejects the
  // boundary character (keywords are plain character strings; the decoder
  // adds the flanking boundary nodes itself).
  LabelSequence encode_keyword(const std::string& keyword) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::vector<char> labels_;
  int blank_index_;
  int boundary_index_;
  int char_to_index_[256];
};

}  // namespace ctcspot

#endif  // CTCSPOT_ALPHABET_HPP
