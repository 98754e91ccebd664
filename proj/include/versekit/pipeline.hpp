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

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "versekit/config.hpp"
#include "versekit/filters.hpp"
#include "versekit/index.hpp"
#include "versekit/suggest.hpp"

namespace versekit::service {

/// An input artifact is absent. The message names the stage producing it.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::filesystem::path& path, std::string_view stage);
};

void require_artifact(const std::filesystem::path& path, std::string_view stage);

/// `poet_id<TAB>verse` per line.
void write_verses(const std::filesystem::path& path,
                  const std::vector<filters::Verse>& verses);
std::vector<filters::Verse> read_verses(const std::filesystem::path& path);
/// Same layout; `#` lines are comments.
std::vector<filters::Verse> read_first_lines(
    const std::filesystem::path& path);

nlohmann::json report_json(const filters::RejectionReport& r);
nlohmann::json report_json(const suggest::EvalReport& r);

struct LmSummary {
  std::size_t lines = 0;
  std::vector<std::string> poets;
  double final_pretrain_loss = 0.0;
};
LmSummary train_lm(const Config& cfg);

/// Expands every fine-tuned poet model into `generated.tsv`.
std::size_t generate(const Config& cfg);

filters::FilterResult filter(const Config& cfg);

struct EncoderSummary {
  std::size_t comment_pairs = 0;
  std::size_t poetic_pairs = 0;
  double final_loss = 0.0;
};
EncoderSummary train_encoder(const Config& cfg);

/// Builds and saves the index over `kept.tsv`.
index::QuantizedIndex build_index(const Config& cfg);

/// Loaded serving state. Immovable: the suggester points into its members.
class Engine {
 public:
  explicit Engine(const Config& cfg);
  Engine(phonology::Phonology phon, dualenc::DualEncoder enc,
         index::QuantizedIndex idx, int nprobe = 0);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const phonology::Phonology& phonology() const { return phon_; }
  const dualenc::DualEncoder& encoder() const { return enc_; }
  const index::QuantizedIndex& index() const { return idx_; }
  const suggest::Suggester& suggester() const { return *suggester_; }

 private:
  phonology::Phonology phon_;
  dualenc::DualEncoder enc_;
  index::QuantizedIndex idx_;
  std::unique_ptr<suggest::Suggester> suggester_;
};

}  // namespace versekit::service
