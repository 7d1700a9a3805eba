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

#ifndef CTCSPOT_WAV_HPP
#define CTCSPOT_WAV_HPP

#include <string>
#include <vector>

namespace ctcspot {
namespace wav {

struct Audio {
  std::vector<double> samples;  // scaled to [-1, 1)
  int sample_rate = 0;
};

// Reads a mono 16-bit little-endian PCM WAV file. Throws DataError on any
// other encoding or on malformed/truncated files.
Audio read(const std::string& path);

// Writes samples (clipped to [-1, 1)) as mono 16-bit PCM.
void write(const std::string& path, const std::vector<double>& samples,
           int sample_rate);

}  // namespace wav
}  // namespace ctcspot

#endif  // CTCSPOT_WAV_HPP
