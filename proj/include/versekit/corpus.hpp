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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "versekit/common.hpp"
#include "versekit/phonology.hpp"

namespace versekit::corpus {

enum class SourceTag { kPoetic, kComments };

std::string_view to_string(SourceTag tag);
/// "poetic" | "comments"; throws Error otherwise.
SourceTag parse_source_tag(std::string_view s);

using Stanza = std::vector<std::string>;

struct Poem {
  std::string poet_id;
  std::vector<Stanza> stanzas;
  std::optional<std::string> title;
};

struct Corpus {
  std::vector<Poem> poems;
  SourceTag source_tag = SourceTag::kPoetic;

  std::size_t line_count() const;
  /// Every line in file order.
  std::vector<std::string> lines() const;
  std::set<std::string> poet_ids() const;
  /// Poems of one poet only, same tag.
  Corpus for_poet(std::string_view poet_id) const;
  /// Appends the poems of `other`; tags must agree.
  void merge(const Corpus& other);
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

/// File format: `#poet: <id>` opens a poem, an optional `#title: <t>` may
/// follow, then one verse per line with blank lines between stanzas. Any
/// other `#` line is metadata and ignored.
Corpus load_corpus(const std::filesystem::path& path, SourceTag tag);
Corpus parse_corpus(std::string_view text, SourceTag tag,
                    const std::string& source_name = "<memory>");
/// All `*.txt` files of a directory, in name order.
Corpus load_corpus_dir(const std::filesystem::path& dir, SourceTag tag);

struct VersePair {
  std::string parent;
  std::string child;
  SourceTag source_tag = SourceTag::kPoetic;

  friend bool operator==(const VersePair&, const VersePair&) = default;
};

/// Adjacent lines within each stanza; never across a stanza boundary.
std::vector<VersePair> extract_pairs(const Corpus& c);

/// True iff some verbalized, lowercased token of `text` is in `lexicon`.
bool detect_demographic_mention(std::string_view text,
                                const std::set<std::string>& lexicon,
                                const phonology::Verbalizer& verbalizer = {});

/// Replaces each word of `text` found in `antonyms` (case-insensitive) by its
/// mapped word, keeping punctuation, spacing and a leading capital.
std::string substitute_antonyms(
    std::string_view text, const std::map<std::string, std::string>& antonyms);

/// Rewrites the child of every pair whose parent has a demographic mention,
/// and of a seeded `fraction` of the remaining pairs. Selection depends only
/// on pair position and parent, so reapplying with the same seed touches the
/// same pairs.
std::vector<VersePair> augment_positivize(
    const std::vector<VersePair>& pairs,
    const std::map<std::string, std::string>& sentiment_lexicon,
    const std::set<std::string>& demo_lexicon, double fraction,
    std::uint64_t seed, const phonology::Verbalizer& verbalizer = {});

}  // namespace versekit::corpus
