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

#ifndef CTCSPOT_IO_UTIL_HPP
#define CTCSPOT_IO_UTIL_HPP

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "common.hpp"

namespace ctcspot {
namespace io {

// Little-endian primitives for the binary model/stream formats.

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& out, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  put_u32(out, u);
}

inline void put_f64(std::ostream& out, double d) {
  std::uint64_t u;
  std::memcpy(&u, &d, 8);
  put_u64(out, u);
}

inline std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError("truncated file while reading " + what);
  return static_cast<std::uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& in, const std::string& what) {
  const std::uint64_t lo = get_u32(in, what);
  const std::uint64_t hi = get_u32(in, what);
  return lo | (hi << 32);
}

inline float get_f32(std::istream& in, const std::string& what) {
  const std::uint32_t u = get_u32(in, what);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

inline double get_f64(std::istream& in, const std::string& what) {
  const std::uint64_t u = get_u64(in, what);
  double d;
  std::memcpy(&d, &u, 8);
  return d;
}

}  // namespace io
}  // namespace ctcspot

#endif  // CTCSPOT_IO_UTIL_HPP
