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

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "versekit/dualenc.hpp"
#include "versekit/index.hpp"
#include "versekit/phonology.hpp"

namespace versekit::suggest {

enum class Structure { kQuatrain, kCouplet, kFreeVerse };

std::string_view to_string(Structure s);
/// "quatrain" | "couplet" | "free_verse"; throws Error otherwise.
Structure parse_structure(std::string_view s);

struct SuggestRequest {
  std::string previous_verse;
  std::optional<std::string> rhyme_with;
  std::set<std::string> poets;
  Structure structure = Structure::kQuatrain;
  std::optional<int> syllables;
  int n = 3;
  /// Lines already in the poem; never suggested again.
  std::vector<std::string> exclude;

  void validate() const;
};

struct Suggestion {
  index::RecordId id = 0;
  std::string text;
  float score = 0.0f;
  phonology::RhymeClass rhyme_class = phonology::RhymeClass::kNone;
};

struct SuggestResponse {
  std::map<std::string, std::vector<Suggestion>> by_poet;
  bool fallback_used = false;
  std::vector<std::string> diagnostics;
};

struct QuatrainCompletion {
  /// Lines 2..4.
  std::vector<std::string> lines;
  /// Whether lines 3 and 4 had to be served without a rhyme.
  std::array<bool, 2> fallback{};
};

struct EvalReport {
  std::size_t quatrains = 0;
  std::size_t completed = 0;
  /// Fraction of completed quatrains with lines 1/3 and 2/4 rhyming.
  double abab_compliance = 0.0;
  /// The same, over quatrains where neither rhyme step fell back.
  double abab_compliance_with_candidates = 0.0;
  std::size_t with_candidates = 0;
  double syllable_mean = 0.0;
  double syllable_stddev = 0.0;
  /// Fraction of rhyme steps (two per quatrain) served by the fallback.
  double fallback_rate = 0.0;
  /// 1 - distinct / total over all suggested lines.
  double duplicate_rate = 0.0;
  std::vector<std::string> errors;
};

/// Serving-time orchestration over one immutable index and encoder. All
/// methods are const and safe to call concurrently.
class Suggester {
 public:
  /// `nprobe` 0 means the index default.
  Suggester(const index::QuantizedIndex& idx, const dualenc::DualEncoder& enc,
            const phonology::Phonology& phon, int nprobe = 0);

  bool has_poet(const std::string& poet) const { return poet_counts_.count(poet) > 0; }
  const std::map<std::string, std::size_t>& poet_counts() const { return poet_counts_; }

  SuggestResponse suggest_next(const SuggestRequest& req) const;
  QuatrainCompletion complete_quatrain(const std::string& first_line,
                                       const std::string& poet) const;
  EvalReport eval_report(
      const std::vector<filters::Verse>& first_lines) const;

  /// Rhyme class of two lines; None when either has no rhyme key.
  phonology::RhymeClass rhyme_between(std::string_view a, std::string_view b) const;

 private:
  /// Searches the probed lists first and widens to every list when that
  /// yields fewer than `k` hits.
  std::vector<index::Hit> search(const index::Embedding& q,
                                 const index::FilterSpec& spec, int k) const;

  const index::QuantizedIndex& idx_;
  const dualenc::DualEncoder& enc_;
  const phonology::Phonology& phon_;
  int nprobe_;
  std::map<std::string, std::size_t> poet_counts_;
};

}  // namespace versekit::suggest
