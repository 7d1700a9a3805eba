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

#ifndef CTCSPOT_MODEL_IO_HPP
#define CTCSPOT_MODEL_IO_HPP

#include <string>

#include "alphabet.hpp"
#include "features.hpp"
#include "net.hpp"

namespace ctcspot {

// Everything a deployment needs: network weights, the label set and the
// feature normalizer fitted on the training data.
struct Model {
  net::NetworkConfig config;
  net::NetworkParams params;
  features::NormalizerStats stats;
  Alphabet alphabet = Alphabet::standard();
};

// Binary, versioned, little-endian: magic "CTCSPOT1", config block,
// alphabet block, normalizer block, then a named tensor table with
// row-major float32 payloads. save(load(f)) reproduces f byte for byte.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace ctcspot

#endif  // CTCSPOT_MODEL_IO_HPP
