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
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/phonology.hpp"

namespace versekit::filters {

enum class PosTag { kNoun, kVerb, kAdj, kAdv, kPron, kDet, kAdp, kConj, kNum,
                    kPrt, kPunct, kX };

std::string_view to_string(PosTag t);
PosTag parse_pos_tag(std::string_view s);

/// Lexicon lookup with suffix rules for unknown words. Total: every token
/// gets exactly one tag.
class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(phonology::Verbalizer verbalizer)
      : verbalizer_(std::move(verbalizer)) {}

  /// `word<TAB>TAG` lines; `#` comments.
  static PosTagger from_file(const std::filesystem::path& lexicon,
                             phonology::Verbalizer verbalizer = {});

  void add(std::string_view word, PosTag tag);
  PosTag tag_word(std::string_view word) const;
  /// One tag per verbalized token.
  std::vector<PosTag> tag(std::string_view line) const;
  const phonology::Verbalizer& verbalizer() const { return verbalizer_; }

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  phonology::Verbalizer verbalizer_;
};

/// Tags joined by "-", e.g. "DET-NOUN-VERB".
std::string fingerprint(const std::vector<PosTag>& tags);

using FingerprintSet = std::set<std::string>;

FingerprintSet build_fingerprints(const corpus::Corpus& c,
                                  const PosTagger& tagger);

struct FilterConfig {
  int min_syllables = 4;
  int max_syllables = 16;
  std::set<std::string> blocklist;
  std::vector<std::set<std::string>> combo_blocklist;
  /// poet_id -> normalized original lines.
  std::map<std::string, std::set<std::string>> originality_index;

  void validate() const;
  /// Reads the blocklist and combo files (one entry/group per line).
  void load_lists(const std::filesystem::path& blocklist_file,
                  const std::filesystem::path& combo_file);
};

std::map<std::string, std::set<std::string>> build_originality_index(
    const corpus::Corpus& c);

/// Filters in the order they are applied.
enum class FilterKind { kBalance, kSyllables, kBlocklist, kOriginality, kPos,
                        kCombo };
inline constexpr std::size_t kFilterCount = 6;

std::string_view to_string(FilterKind k);

struct Verse {
  std::string poet_id;
  std::string text;

  friend auto operator<=>(const Verse&, const Verse&) = default;
};

struct RejectionReport {
  static constexpr std::size_t kSampleCap = 5;

  std::size_t input = 0;
  std::size_t kept = 0;
  std::array<std::size_t, kFilterCount> counts{};
  std::array<std::vector<Verse>, kFilterCount> samples;

  std::size_t rejected() const;
  void merge(const RejectionReport& other);
};

struct FilterResult {
  std::vector<Verse> kept;
  RejectionReport report;
};

/// Index of the first failing filter, or nullopt if `v` passes all of them.
std::optional<FilterKind> first_failure(const Verse& v, const FilterConfig& cfg,
                                        const FingerprintSet& fps,
                                        const PosTagger& tagger,
                                        const phonology::Phonology& phon);

bool balanced(std::string_view text);

FilterResult apply_filters(const std::vector<Verse>& verses,
                           const FilterConfig& cfg, const FingerprintSet& fps,
                           const PosTagger& tagger,
                           const phonology::Phonology& phon);

}  // namespace versekit::filters
