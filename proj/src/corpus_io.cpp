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

#include "corpus_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "features.hpp"
#include "stream_file.hpp"

namespace ctcspot {
namespace corpus_io {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

void check_plain_field(const std::string& value, const std::string& what) {
  if (value.find(',') != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw InvalidArgument(what + " may not contain commas or newlines: " +
                          value);
  }
}

void write_utterance_stream(const std::string& path,
                            const synth::AlignedUtterance& utt) {
  StreamWriter writer(path, StreamKind::kFeatures,
                      static_cast<int>(utt.frames[0].size()),
                      features::kFramePeriodMs);
  for (const auto& f : utt.frames) writer.write_frame(f);
  writer.close();
}

}  // namespace

void write_corpus(const std::string& dir, const synth::Corpus& train_corpus,
                  const synth::Corpus& eval_corpus,
                  const synth::CorpusConfig& config,
                  const std::vector<std::string>& keywords_long,
                  const std::vector<std::string>& keywords_short) {
  fs::create_directories(fs::path(dir) / "utt");

  std::ofstream manifest(fs::path(dir) / "manifest.csv");
  if (!manifest) throw DataError("corpus: cannot write manifest in " + dir);
  manifest << "id,split,frames,transcript,file\n";
  auto emit = [&](const synth::Corpus& corpus, const char* split) {
    for (const auto& utt : corpus.utterances) {
      check_plain_field(utt.id, "utterance id");
      check_plain_field(utt.text, "transcript");
      const std::string rel = "utt/" + utt.id + ".kws";
      write_utterance_stream((fs::path(dir) / rel).string(), utt);
      manifest << utt.id << ',' << split << ',' << utt.frames.size() << ','
               << utt.text << ',' << rel << '\n';
    }
  };
  emit(train_corpus, "train");
  emit(eval_corpus, "eval");
  manifest.close();

  // concatenated evaluation stream + ground truth with global end frames
  {
    StreamWriter writer((fs::path(dir) / "eval_stream.kws").string(),
                        StreamKind::kFeatures, config.synth.feature_dim,
                        features::kFramePeriodMs);
    std::vector<long> offsets;
    long offset = 0;
    for (const auto& utt : eval_corpus.utterances) {
      offsets.push_back(offset);
      for (const auto& f : utt.frames) writer.write_frame(f);
      offset += static_cast<long>(utt.frames.size());
    }
    writer.close();

    std::vector<TruthRow> rows;
    for (const auto& occ : eval_corpus.occurrences) {
      rows.push_back({occ.word, eval_corpus.utterances[occ.utterance].id,
                      offsets[occ.utterance] + occ.end_frame});
    }
    write_truth((fs::path(dir) / "truth.csv").string(), rows);
  }

  auto write_list = [&](const char* name,
                        const std::vector<std::string>& words) {
    std::ofstream out(fs::path(dir) / name);
    out << "# one keyword per line\n";
    for (const auto& w : words) out << w << '\n';
  };
  write_list("keywords_long.txt", keywords_long);
  write_list("keywords_short.txt", keywords_short);

  std::ofstream meta(fs::path(dir) / "corpus.meta");
  meta << "feature_dim=" << config.synth.feature_dim << '\n'
       << "frame_period_ms=" << features::kFramePeriodMs << '\n';
}

std::vector<ManifestRow> read_manifest(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.csv");
  if (!in) throw DataError("corpus: no manifest.csv in " + dir);
  std::vector<ManifestRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw DataError("corpus: malformed manifest row: " + line);
    }
    rows.push_back(
        {fields[0], fields[1], std::stol(fields[2]), fields[3], fields[4]});
  }
  return rows;
}

std::vector<train::Utterance> load_split(const std::string& dir,
                                         const std::string& split,
                                         const Alphabet& alphabet) {
  std::vector<train::Utterance> utterances;
  for (const auto& row : read_manifest(dir)) {
    if (row.split != split) continue;
    train::Utterance utt;
    utt.id = row.id;
    utt.labels = alphabet.encode(row.transcript);
    StreamReader reader((fs::path(dir) / row.file).string());
    if (reader.kind() != StreamKind::kFeatures) {
      throw DataError("corpus: utterance stream is not features: " + row.file);
    }
    utt.frames = reader.read_all();
    if (static_cast<long>(utt.frames.size()) != row.frames) {
      throw DataError("corpus: frame count mismatch for " + row.id);
    }
    utterances.push_back(std::move(utt));
  }
  return utterances;
}

void write_truth(const std::string& path, const std::vector<TruthRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("corpus: cannot write " + path);
  out << "keyword,utterance,end_frame\n";
  for (const auto& row : rows) {
    check_plain_field(row.keyword, "keyword");
    check_plain_field(row.utterance, "utterance id");
    out << row.keyword << ',' << row.utterance << ',' << row.end_frame << '\n';
  }
}

std::vector<TruthRow> read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("truth: cannot open " + path);
  std::vector<TruthRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 3) throw DataError("truth: malformed row: " + line);
    rows.push_back({fields[0], fields[1], std::stol(fields[2])});
  }
  return rows;
}

std::vector<std::string> read_keyword_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("keywords: cannot open " + path);
  std::vector<std::string> keywords;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                             line.back() == '\r')) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) {
      ++start;
    }
    line.erase(0, start);
    if (!line.empty()) keywords.push_back(line);
  }
  return keywords;
}

}  // namespace corpus_io
}  // namespace ctcspot
