// Copyright 2026 The versekit Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "versekit/dualenc.hpp"
#include "versekit/generator.hpp"

namespace versekit::service {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  int threads = 8;
  /// Latency gate used by the load test, in milliseconds.
  double p50_budget_ms = 100.0;
};

struct IndexConfig {
  /// 0 picks the default for the record count.
  int centroids = 0;
  /// 0 picks a quarter of the centroids.
  int nprobe = 0;
  int kmeans_iterations = 10;
};

/// Everything the pipeline stages and the server read. Built from a named
/// profile ("desk", "paper", "smoke"), then overridden by a JSON file.
struct Config {
  std::string profile = "desk";
  std::filesystem::path data_dir = VERSEKIT_DATA_DIR;
  std::filesystem::path work_dir = "work";
  std::uint64_t seed = 1;

  generator::GenConfig generator;
  /// 0 means every poet in the corpus.
  int max_poets = 0;
  dualenc::EncoderConfig encoder;
  dualenc::TrainConfig encoder_training;
  double augment_fraction = 0.5;
  int min_syllables = 4;
  int max_syllables = 16;
  IndexConfig index;
  ServerConfig server;

  static Config for_profile(std::string_view name);
  /// Unknown keys are errors. Relative paths resolve against `base_dir`.
  static Config from_json(const nlohmann::json& j,
                          const std::filesystem::path& base_dir);
  static Config load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const;
};

/// File layout of the pipeline's artifacts under `work_dir`.
struct Artifacts {
  std::filesystem::path root;

  std::filesystem::path lm_tokenizer() const { return root / "lm" / "tokenizer.bin"; }
  std::filesystem::path lm_base() const { return root / "lm" / "base.bin"; }
  std::filesystem::path lm_poet(std::string_view poet) const;
  std::filesystem::path generated() const { return root / "generated.tsv"; }
  std::filesystem::path kept() const { return root / "kept.tsv"; }
  std::filesystem::path filter_report() const { return root / "filter_report.json"; }
  std::filesystem::path encoder() const { return root / "encoder.bin"; }
  std::filesystem::path index() const { return root / "index.bin"; }
  std::filesystem::path poems_db() const { return root / "poems.sqlite"; }
};

struct DataFiles {
  std::filesystem::path root;

  std::filesystem::path poetic() const { return root / "corpus" / "poetic"; }
  std::filesystem::path comments() const { return root / "corpus" / "comments"; }
  std::filesystem::path phonology() const { return root / "phonology"; }
  std::filesystem::path verbalization_rules() const {
    return root / "phonology" / "verbalization_rules.tsv";
  }
  std::filesystem::path pos_lexicon() const { return root / "lexicons" / "pos_lexicon.tsv"; }
  std::filesystem::path blocklist() const { return root / "lexicons" / "blocklist.txt"; }
  std::filesystem::path combo_blocklist() const {
    return root / "lexicons" / "combo_blocklist.txt";
  }
  std::filesystem::path demographic() const { return root / "lexicons" / "demographic.txt"; }
  std::filesystem::path sentiment() const {
    return root / "lexicons" / "sentiment_antonyms.tsv";
  }
  std::filesystem::path first_lines() const { return root / "eval" / "first_lines.tsv"; }
};

inline Artifacts artifacts(const Config& c) { return {c.work_dir}; }
inline DataFiles data_files(const Config& c) { return {c.data_dir}; }

}  // namespace versekit::service
