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

#include "versekit/index.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace versekit::index {

namespace {

constexpr char kMagic[] = "VKINDEX1";
constexpr std::uint32_t kVersion = 1;

double sq_distance(const std::vector<double>& c, const Embedding& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double d = c[i] - static_cast<double>(e[i]);
    s += d * d;
  }
  return s;
}

double sq_distance(const Embedding& c, const Embedding& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double d = static_cast<double>(c[i]) - static_cast<double>(e[i]);
    s += d * d;
  }
  return s;
}

template <typename C>
int nearest(const std::vector<C>& centroids, const Embedding& e) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = sq_distance(centroids[c], e);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

bool better(const Hit& a, const Hit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

void write_record(BinaryWriter& w, const VerseRecord& r) {
  w.u32(r.id);
  w.str(r.poet_id);
  w.str(r.text);
  w.i32(r.syllables);
  w.str(r.pos_fingerprint);
  w.u32(static_cast<std::uint32_t>(r.rhyme_keys.size()));
  for (const auto& k : r.rhyme_keys) {
    w.str(k.final_word);
    w.u32(static_cast<std::uint32_t>(k.key_phonemes.size()));
    for (auto p : k.key_phonemes) w.u8(p.code());
  }
  w.f32s(r.embedding.data(), r.embedding.size());
}

VerseRecord read_record(BinaryReader& r, int dim) {
  VerseRecord v;
  v.id = r.u32();
  v.poet_id = r.str();
  v.text = r.str();
  v.syllables = r.i32();
  v.pos_fingerprint = r.str();
  v.rhyme_keys.resize(r.u32());
  for (auto& k : v.rhyme_keys) {
    k.final_word = r.str();
    k.key_phonemes.resize(r.u32());
    for (auto& p : k.key_phonemes) {
      std::uint8_t code = r.u8();
      try {
        p = phonology::Phone::make(code >> 2, code & 3);
      } catch (const Error&) {
        throw FormatError("index: bad phoneme code");
      }
    }
  }
  v.embedding.resize(static_cast<std::size_t>(dim));
  r.f32s(v.embedding.data(), v.embedding.size());
  return v;
}

}  // namespace

std::vector<VerseRecord> build_catalog(const std::vector<filters::Verse>& verses,
                                       const dualenc::DualEncoder& enc,
                                       const phonology::Phonology& phon,
                                       const filters::PosTagger& tagger,
                                       std::vector<std::string>* diagnostics) {
  std::vector<VerseRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::string> texts;
  for (const auto& v : verses) {
    if (!seen.emplace(v.poet_id, v.text).second) continue;
    VerseRecord r;
    r.id = static_cast<RecordId>(out.size());
    r.poet_id = v.poet_id;
    r.text = v.text;
    r.syllables = phon.syllable_count(v.text);
    try {
      r.rhyme_keys = phon.rhyme_key(v.text);
    } catch (const phonology::NoRhymeKeyError& e) {
      std::string msg = "record " + std::to_string(r.id) + " (" + v.poet_id +
                        "): no rhyme key: " + e.what();
      spdlog::debug("{}", msg);
      if (diagnostics) diagnostics->push_back(std::move(msg));
    }
    r.pos_fingerprint = filters::fingerprint(tagger.tag(v.text));
    texts.push_back(v.text);
    out.push_back(std::move(r));
  }
  auto embeddings = enc.encode_children(texts);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].embedding = std::move(embeddings[i]);
  }
  return out;
}

int default_centroid_count(std::size_t n) {
  if (n == 0) return 1;
  auto c = static_cast<std::size_t>(std::lround(4.0 * std::sqrt(static_cast<double>(n))));
  return static_cast<int>(std::clamp<std::size_t>(c, 1, n));
}

void FilterSpec::validate() const {
  if (poets.empty()) throw Error("filter spec: poets must not be empty");
  if (rhyme) {
    for (auto c : rhyme->allowed) {
      if (c == phonology::RhymeClass::kNone) {
        throw Error("filter spec: rhyme classes must be perfect or imperfect");
      }
    }
  }
}

bool filter_match(const VerseRecord& r, const FilterSpec& spec) {
  if (!spec.poets.count(r.poet_id)) return false;
  if (spec.syllables && r.syllables != *spec.syllables) return false;
  if (spec.rhyme) {
    auto c = phonology::classify_rhyme(spec.rhyme->keys, r.rhyme_keys,
                                       spec.rhyme->table);
    if (!spec.rhyme->allowed.count(c)) return false;
  }
  if (!spec.exclude_texts.empty() &&
      spec.exclude_texts.count(str::normalize_line(r.text))) {
    return false;
  }
  return true;
}

QuantizedIndex QuantizedIndex::build(std::vector<VerseRecord> records,
                                     int n_centroids, std::uint64_t seed,
                                     int iterations) {
  if (records.empty()) throw Error("build_index: no records");
  if (n_centroids < 1 || static_cast<std::size_t>(n_centroids) > records.size()) {
    throw Error("build_index: need 1 <= n_centroids <= record count");
  }
  if (iterations < 0) throw Error("build_index: iterations must be >= 0");
  const std::size_t dim = records.front().embedding.size();
  if (dim == 0) throw Error("build_index: empty embeddings");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id != i) throw Error("build_index: ids must be 0..N-1 in order");
    if (records[i].embedding.size() != dim) {
      throw Error("build_index: embedding dimensions differ");
    }
  }

  std::mt19937_64 rng(seed);
  const std::size_t n = records.size();
  const auto k = static_cast<std::size_t>(n_centroids);
  auto as_double = [&](const Embedding& e) {
    return std::vector<double>(e.begin(), e.end());
  };

  // k-means++ seeding.
  std::vector<std::vector<double>> cent;
  cent.push_back(as_double(records[rng() % n].embedding));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_distance(cent[0], records[i].embedding);
  while (cent.size() < k) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng() % n;
    }
    cent.push_back(as_double(records[pick].embedding));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_distance(cent.back(), records[i].embedding));
    }
  }

  std::vector<int> assign(n, 0);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(cent, records[i].embedding);
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sum[static_cast<std::size_t>(assign[i])];
      for (std::size_t d = 0; d < dim; ++d) s[d] += records[i].embedding[d];
      ++count[static_cast<std::size_t>(assign[i])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // an empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) {
        cent[c][d] = sum[c][d] / static_cast<double>(count[c]);
      }
    }
  }

  QuantizedIndex idx;
  idx.dim_ = static_cast<int>(dim);
  for (const auto& c : cent) idx.centroids_.emplace_back(c.begin(), c.end());
  idx.postings_.assign(k, {});
  // Final assignment against the stored (float) codebook.
  for (std::size_t i = 0; i < n; ++i) {
    idx.postings_[static_cast<std::size_t>(nearest(idx.centroids_, records[i].embedding))]
        .push_back(static_cast<RecordId>(i));
  }
  idx.nprobe_default_ = std::max(1, (n_centroids + 3) / 4);
  idx.records_ = std::move(records);
  return idx;
}

void QuantizedIndex::set_nprobe_default(int n) {
  if (n < 1 || n > centroid_count()) throw Error("nprobe out of range");
  nprobe_default_ = n;
}

std::vector<Hit> QuantizedIndex::rank(const Embedding& query,
                                      const FilterSpec& spec, int k,
                                      const std::vector<int>& lists) const {
  if (k < 1) throw Error("search: k must be >= 1");
  if (query.size() != static_cast<std::size_t>(dim_)) {
    throw Error("search: query dimension mismatch");
  }
  std::vector<Hit> hits;
  for (int c : lists) {
    for (RecordId id : postings_[static_cast<std::size_t>(c)]) {
      const auto& r = records_[id];
      if (filter_match(r, spec)) hits.push_back({id, dualenc::dot(query, r.embedding)});
    }
  }
  auto top = std::min(hits.size(), static_cast<std::size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top),
                    hits.end(), better);
  hits.resize(top);
  return hits;
}

std::vector<Hit> QuantizedIndex::search(const Embedding& query,
                                        const FilterSpec& spec, int k,
                                        int nprobe) const {
  if (nprobe < 1 || nprobe > centroid_count()) {
    throw Error("search: need 1 <= nprobe <= centroid count");
  }
  if (query.size() != static_cast<std::size_t>(dim_)) {
    throw Error("search: query dimension mismatch");
  }
  std::vector<std::pair<double, int>> order;
  order.reserve(centroids_.size());
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    order.emplace_back(sq_distance(centroids_[c], query), static_cast<int>(c));
  }
  std::partial_sort(order.begin(), order.begin() + nprobe, order.end());
  std::vector<int> lists;
  for (int i = 0; i < nprobe; ++i) lists.push_back(order[static_cast<std::size_t>(i)].second);
  return rank(query, spec, k, lists);
}

std::vector<Hit> QuantizedIndex::exhaustive_search(const Embedding& query,
                                                   const FilterSpec& spec,
                                                   int k) const {
  std::vector<int> lists(centroids_.size());
  std::iota(lists.begin(), lists.end(), 0);
  return rank(query, spec, k, lists);
}

AuditResult QuantizedIndex::audit(const std::set<std::string>& group,
                                  const phonology::Verbalizer& verbalizer) const {
  std::set<std::string> want;
  for (const auto& w : group) want.insert(str::to_lower(w));
  AuditResult out;
  for (const auto& r : records_) {
    auto tokens = verbalizer.verbalize(r.text);
    std::set<std::string> have(tokens.begin(), tokens.end());
    if (!std::includes(have.begin(), have.end(), want.begin(), want.end())) continue;
    ++out.count;
    if (out.samples.size() < kAuditSamples) out.samples.push_back(r.id);
  }
  return out;
}

std::map<std::string, std::size_t> QuantizedIndex::poet_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& r : records_) ++out[r.poet_id];
  return out;
}

void QuantizedIndex::save(const std::filesystem::path& path) const {
  auto out = open_for_write(path);
  BinaryWriter w(out);
  w.magic(kMagic);
  w.u32(kVersion);
  w.u64(records_.size());
  w.u32(static_cast<std::uint32_t>(centroids_.size()));
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u32(static_cast<std::uint32_t>(nprobe_default_));
  for (const auto& c : centroids_) w.f32s(c.data(), c.size());
  for (const auto& list : postings_) {
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (RecordId id : list) w.u32(id);
  }
  for (const auto& r : records_) write_record(w, r);
}

QuantizedIndex QuantizedIndex::load(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  BinaryReader r(in, path.string());
  r.expect_magic(kMagic);
  if (r.u32() != kVersion) throw FormatError("unsupported index version");
  QuantizedIndex idx;
  auto n = r.u64();
  auto k = r.u32();
  idx.dim_ = static_cast<int>(r.u32());
  idx.nprobe_default_ = static_cast<int>(r.u32());
  if (k == 0 || idx.dim_ <= 0 || idx.nprobe_default_ < 1 ||
      idx.nprobe_default_ > static_cast<int>(k) || n > (1ull << 32)) {
    throw FormatError(path.string() + ": corrupt index header");
  }
  idx.centroids_.assign(k, Embedding(static_cast<std::size_t>(idx.dim_)));
  for (auto& c : idx.centroids_) r.f32s(c.data(), c.size());
  idx.postings_.resize(k);
  std::vector<bool> seen(n, false);
  for (auto& list : idx.postings_) {
    auto len = r.u32();
    if (len > n) throw FormatError(path.string() + ": corrupt postings");
    list.resize(len);
    for (auto& id : list) {
      id = r.u32();
      if (id >= n || seen[id]) throw FormatError(path.string() + ": corrupt postings");
      seen[id] = true;
    }
  }
  idx.records_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    idx.records_.push_back(read_record(r, idx.dim_));
    if (idx.records_.back().id != i) throw FormatError(path.string() + ": bad record id");
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw FormatError(path.string() + ": record missing from postings");
  }
  return idx;
}

}  // namespace versekit::index
