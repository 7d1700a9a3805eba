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

#include "wav.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "common.hpp"

namespace ctcspot {
namespace wav {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (p[1] << 8) | (p[2] << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Audio read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("wav: cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw DataError("wav: not a RIFF/WAVE file: " + path);
  }

  Audio audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const std::uint32_t chunk = read_u32(data.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk > data.size()) {
      throw DataError("wav: truncated chunk in " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk < 16) throw DataError("wav: malformed fmt chunk");
      const std::uint16_t format = read_u16(data.data() + body);
      const std::uint16_t channels = read_u16(data.data() + body + 2);
      const std::uint32_t rate = read_u32(data.data() + body + 4);
      const std::uint16_t bits = read_u16(data.data() + body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw DataError("wav: only mono 16-bit PCM is supported: " + path);
      }
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw DataError("wav: data chunk before fmt chunk");
      const std::size_t count = chunk / 2;
      audio.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::int16_t v = static_cast<std::int16_t>(
            read_u16(data.data() + body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return audio;
    }
    pos = body + chunk + (chunk & 1);  // chunks are word-aligned
  }
  throw DataError("wav: no data chunk in " + path);
}

void write(const std::string& path, const std::vector<double>& samples,
           int sample_rate) {
  std::string out;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(samples.size() * 2);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : samples) {
    const double clipped = std::clamp(s, -1.0, 32767.0 / 32768.0);
    const std::int16_t v =
        static_cast<std::int16_t>(std::lrint(clipped * 32768.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("wav: cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("wav: write failed: " + path);
}

}  // namespace wav
}  // namespace ctcspot
