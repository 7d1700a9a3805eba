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

#include "alphabet.hpp"

#include <cctype>

#include "common.hpp"

namespace ctcspot {

Alphabet::Alphabet(std::vector<char> labels, int blank_index,
                   int boundary_index)
    : labels_(std::move(labels)),
      blank_index_(blank_index),
      boundary_index_(boundary_index) {
  if (labels_.empty()) throw InvalidArgument("alphabet: no labels");
  if (blank_index_ < 0 || blank_index_ >= size() || boundary_index_ < 0 ||
      boundary_index_ >= size() || blank_index_ == boundary_index_) {
    throw InvalidArgument("alphabet: bad blank/boundary indices");
  }
  for (int& v : char_to_index_) v = -1;
  for (int i = 0; i < size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(labels_[i]);
    if (char_to_index_[c] != -1)
      throw InvalidArgument("alphabet: duplicate label");
    char_to_index_[c] = i;
  }
}

Alphabet Alphabet::standard() {
  std::vector<char> labels;
  for (char c = 'a'; c <= 'z'; ++c) labels.push_back(c);
  labels.push_back('\'');
  labels.push_back('.');
  labels.push_back('_');
  labels.push_back('-');
  const int boundary = 28;
  const int blank = 29;
  return Alphabet(std::move(labels), blank, boundary);
}

char Alphabet::label_char(int index) const {
  if (index < 0 || index >= size())
    throw InvalidArgument("alphabet: label index out of range");
  return labels_[index];
}

int Alphabet::index_of(char c) const {
  return char_to_index_[static_cast<unsigned char>(c)];
}

LabelSequence Alphabet::encode(const std::string& text) const {
  LabelSequence seq;
  seq.reserve(text.size());
  for (char raw : text) {
    const char c = static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw)));
    const int idx = index_of(c);
    if (idx < 0 || idx == blank_index_) {
      throw InvalidArgument(std::string("unsupported character '") + raw +
                            "' in text");
    }
    seq.push_back(idx);
  }
  return seq;
}

std::string Alphabet::decode(const LabelSequence& seq) const {
  std::string out;
  out.reserve(seq.size());
  for (int idx : seq) out.push_back(label_char(idx));
  return out;
}

LabelSequence Alphabet::encode_keyword(const std::string& keyword) const {
  if (keyword.empty()) throw InvalidArgument("empty keyword");
  LabelSequence seq = encode(keyword);
  for (int idx : seq) {
    if (idx == boundary_index_) {
      throw InvalidArgument("keyword may not contain the word-boundary label");
    }
  }
  return seq;
}

}  // namespace ctcspot
