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

// Serving index: verse metadata, child-tower embeddings, and filtered
// inner-product search over a coarse k-means codebook.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "versekit/dualenc.hpp"
#include "versekit/filters.hpp"
#include "versekit/phonology.hpp"

namespace versekit::index {

using dualenc::Embedding;
using RecordId = std::uint32_t;

struct VerseRecord {
  RecordId id = 0;
  std::string poet_id;
  std::string text;
  int syllables = 0;
  phonology::RhymeKeySet rhyme_keys;
  std::string pos_fingerprint;
  Embedding embedding;

  friend bool operator==(const VerseRecord&, const VerseRecord&) = default;
};

/// Records for `verses`, deduplicated on (poet, text) in first-seen order,
/// ids 0..N-1. A verse without a rhyme key gets an empty key set and a line
/// in `diagnostics`.
std::vector<VerseRecord> build_catalog(const std::vector<filters::Verse>& verses,
                                       const dualenc::DualEncoder& enc,
                                       const phonology::Phonology& phon,
                                       const filters::PosTagger& tagger,
                                       std::vector<std::string>* diagnostics = nullptr);

struct RhymeFilter {
  phonology::RhymeKeySet keys;
  std::set<phonology::RhymeClass> allowed;
  phonology::ConsonantSimilarityTable table =
      phonology::ConsonantSimilarityTable::default_table();
};

struct FilterSpec {
  std::set<std::string> poets;
  std::optional<int> syllables;
  std::optional<RhymeFilter> rhyme;
  /// Normalized texts never to return.
  std::set<std::string> exclude_texts;

  void validate() const;
};

bool filter_match(const VerseRecord& r, const FilterSpec& spec);

struct Hit {
  RecordId id = 0;
  float score = 0.0f;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct AuditResult {
  std::size_t count = 0;
  std::vector<RecordId> samples;  // at most kAuditSamples, ascending ids
};

inline constexpr std::size_t kAuditSamples = 20;

/// 4 * sqrt(n), clamped to [1, n].
int default_centroid_count(std::size_t n);

class QuantizedIndex {
 public:
  QuantizedIndex() = default;

  /// Seeded k-means++ then `iterations` Lloyd rounds; every record goes to
  /// its nearest centroid (lowest index on ties).
  static QuantizedIndex build(std::vector<VerseRecord> records, int n_centroids,
                              std::uint64_t seed, int iterations = 10);

  std::size_t size() const { return records_.size(); }
  int dim() const { return dim_; }
  int centroid_count() const { return static_cast<int>(centroids_.size()); }
  int nprobe_default() const { return nprobe_default_; }
  void set_nprobe_default(int n);

  const std::vector<VerseRecord>& records() const { return records_; }
  const VerseRecord& record(RecordId id) const { return records_.at(id); }
  const std::vector<Embedding>& centroids() const { return centroids_; }
  const std::vector<std::vector<RecordId>>& postings() const { return postings_; }

  /// Filters the records of the `nprobe` centroids nearest `query`, then
  /// ranks by inner product (descending, ties by ascending id).
  std::vector<Hit> search(const Embedding& query, const FilterSpec& spec, int k,
                          int nprobe) const;
  /// Every record, no codebook.
  std::vector<Hit> exhaustive_search(const Embedding& query,
                                     const FilterSpec& spec, int k) const;

  /// Records whose verbalized tokens include every word of `group`.
  AuditResult audit(const std::set<std::string>& group,
                    const phonology::Verbalizer& verbalizer) const;
  std::map<std::string, std::size_t> poet_counts() const;

  void save(const std::filesystem::path& path) const;
  static QuantizedIndex load(const std::filesystem::path& path);

 private:
  std::vector<Hit> rank(const Embedding& query, const FilterSpec& spec, int k,
                        const std::vector<int>& lists) const;

  int dim_ = 0;
  int nprobe_default_ = 1;
  std::vector<Embedding> centroids_;
  std::vector<std::vector<RecordId>> postings_;
  std::vector<VerseRecord> records_;
};

}  // namespace versekit::index
