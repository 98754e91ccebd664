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

#include <gtest/gtest.h>

#include <fstream>

#include "random_records.hpp"
#include "test_support.hpp"
#include "versekit/index.hpp"

namespace versekit::index {
namespace {

using phonology::RhymeClass;
using testing::shared_phonology;

const dualenc::DualEncoder& small_encoder() {
  static const dualenc::DualEncoder enc = [] {
    auto poetic = corpus::load_corpus_dir(testing::data_dir() / "corpus" / "poetic",
                                          corpus::SourceTag::kPoetic);
    auto sp = generator::train_tokenizer(poetic.lines(), 200);
    dualenc::EncoderConfig c;
    c.layers = 1;
    c.hidden = 16;
    c.feed_forward = 32;
    c.head_hidden = 8;
    return dualenc::DualEncoder(sp, c, 4);
  }();
  return enc;
}

FilterSpec poets(std::set<std::string> p) {
  FilterSpec s;
  s.poets = std::move(p);
  return s;
}

RhymeFilter rhyme_of(const std::string& line, std::set<RhymeClass> allowed) {
  return RhymeFilter{shared_phonology().rhyme_key(line), std::move(allowed),
                     shared_phonology().table()};
}

TEST(BuildCatalog, PopulatesMetadata) {
  filters::PosTagger tagger;
  std::vector<std::string> diag;
  auto recs = build_catalog({{"a", "the wind went out by sea"},
                             {"b", "and we were free"},
                             {"a", "the wind went out by sea"},
                             {"b", "?!"}},
                            small_encoder(), shared_phonology(), tagger, &diag);
  ASSERT_EQ(recs.size(), 3u);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].id, i);
  ASSERT_EQ(recs[0].rhyme_keys.size(), 1u);
  EXPECT_EQ(recs[0].rhyme_keys[0].key_phonemes, phonology::parse_phonemes("IY1"));
  EXPECT_EQ(recs[0].syllables, shared_phonology().syllable_count(recs[0].text));
  EXPECT_EQ(recs[0].pos_fingerprint, filters::fingerprint(tagger.tag(recs[0].text)));
  EXPECT_EQ(recs[1].embedding, small_encoder().encode_child("and we were free"));
  // No words at all: still a record, just never a rhyme.
  EXPECT_TRUE(recs[2].rhyme_keys.empty());
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_NE(diag[0].find("record 2"), std::string::npos);
  EXPECT_TRUE(build_catalog({}, small_encoder(), shared_phonology(), tagger).empty());
}

TEST(FilterMatch, SpecExamples) {
  VerseRecord r;
  r.poet_id = "whitman";
  r.text = "Out on the turning tide";
  r.rhyme_keys = shared_phonology().rhyme_key(r.text);
  r.syllables = 6;
  EXPECT_FALSE(filter_match(r, poets({"dickinson"})));
  auto spec = poets({"whitman"});
  EXPECT_TRUE(filter_match(r, spec));
  spec.rhyme = rhyme_of("by the side", {RhymeClass::kPerfect});
  EXPECT_TRUE(filter_match(r, spec));
  spec.rhyme = rhyme_of("by the side", {RhymeClass::kImperfect});
  EXPECT_FALSE(filter_match(r, spec));
  spec.rhyme = rhyme_of("the stone", {RhymeClass::kPerfect, RhymeClass::kImperfect});
  EXPECT_FALSE(filter_match(r, spec));
  spec.rhyme = rhyme_of("the night", {RhymeClass::kImperfect});
  EXPECT_TRUE(filter_match(r, spec));  // T and D are a similar pair
  spec.rhyme = rhyme_of("the night", {RhymeClass::kPerfect});
  EXPECT_FALSE(filter_match(r, spec));
  spec.rhyme.reset();
  spec.syllables = 7;
  EXPECT_FALSE(filter_match(r, spec));
  spec.syllables = 6;
  spec.exclude_texts = {str::normalize_line("out on the turning tide!")};
  EXPECT_FALSE(filter_match(r, spec));
}

TEST(FilterSpec, Validation) {
  EXPECT_THROW(FilterSpec{}.validate(), Error);
  auto s = poets({"a"});
  s.rhyme = RhymeFilter{{}, {RhymeClass::kNone}};
  EXPECT_THROW(s.validate(), Error);
}

TEST(BuildIndex, SingleCentroidAndErrors) {
  auto recs = testing::random_records(50, 8, shared_phonology(), 1);
  auto idx = QuantizedIndex::build(recs, 1, 3);
  ASSERT_EQ(idx.postings().size(), 1u);
  EXPECT_EQ(idx.postings()[0].size(), 50u);
  EXPECT_THROW(QuantizedIndex::build(recs, 51, 3), Error);
  EXPECT_THROW(QuantizedIndex::build({}, 1, 3), Error);
  recs[3].id = 7;
  EXPECT_THROW(QuantizedIndex::build(recs, 2, 3), Error);
}

TEST(BuildIndex, SeparatedClustersArePartitioned) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> nd(0.0f, 0.05f);
  std::vector<VerseRecord> recs;
  for (int i = 0; i < 200; ++i) {
    VerseRecord r;
    r.id = static_cast<RecordId>(i);
    r.poet_id = "p";
    float centre = i % 2 ? 0.8f : -0.8f;
    for (int d = 0; d < 4; ++d) r.embedding.push_back(centre + nd(rng));
    recs.push_back(r);
  }
  auto idx = QuantizedIndex::build(recs, 2, 9);
  for (const auto& list : idx.postings()) {
    ASSERT_FALSE(list.empty());
    for (RecordId id : list) EXPECT_EQ(id % 2, list.front() % 2);
  }
}

TEST(BuildIndex, InvariantsAndDeterminism) {
  auto recs = testing::random_records(600, 8, shared_phonology(), 2);
  auto a = QuantizedIndex::build(recs, 20, 11);
  auto b = QuantizedIndex::build(recs, 20, 11);
  EXPECT_EQ(a.centroids(), b.centroids());
  EXPECT_EQ(a.postings(), b.postings());
  std::vector<int> owner(recs.size(), -1);
  for (std::size_t c = 0; c < a.postings().size(); ++c) {
    for (RecordId id : a.postings()[c]) {
      EXPECT_EQ(owner[id], -1) << "id " << id << " listed twice";
      owner[id] = static_cast<int>(c);
    }
  }
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_GE(owner[i], 0);
    auto dist = [&](const Embedding& c) {
      double s = 0;
      for (std::size_t d = 0; d < c.size(); ++d) {
        double x = double(c[d]) - double(recs[i].embedding[d]);
        s += x * x;
      }
      return s;
    };
    double mine = dist(a.centroids()[static_cast<std::size_t>(owner[i])]);
    for (const auto& c : a.centroids()) EXPECT_LE(mine, dist(c));
  }
  EXPECT_EQ(a.nprobe_default(), 5);
  EXPECT_EQ(default_centroid_count(10000), 400);
  EXPECT_EQ(default_centroid_count(3), 3);
}

TEST(Search, ExactMatchRanksFirst) {
  std::vector<VerseRecord> recs;
  for (int i = 0; i < 8; ++i) {
    VerseRecord r;
    r.id = static_cast<RecordId>(i);
    r.poet_id = "p";
    r.embedding.assign(8, 0.0f);
    r.embedding[static_cast<std::size_t>(i)] = 0.9f;
    recs.push_back(r);
  }
  auto idx = QuantizedIndex::build(recs, 3, 1);
  auto hits = idx.search(recs[5].embedding, poets({"p"}), 3, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].id, 5u);
  // The rest tie at zero and come back in id order.
  EXPECT_EQ(hits[1].id, 0u);
  EXPECT_EQ(hits[2].id, 1u);
  EXPECT_THROW(idx.search(recs[0].embedding, poets({"p"}), 0, 1), Error);
  EXPECT_THROW(idx.search(recs[0].embedding, poets({"p"}), 1, 4), Error);
  EXPECT_TRUE(idx.search(recs[0].embedding, poets({"q"}), 5, 3).empty());
}

FilterSpec random_spec(std::mt19937_64& rng) {
  FilterSpec s;
  s.poets.insert("poet" + std::to_string(rng() % 5));
  if (rng() % 2) s.poets.insert("poet" + std::to_string(rng() % 5));
  if (rng() % 3 == 0) s.syllables = 4 + static_cast<int>(rng() % 9);
  if (rng() % 2) {
    const auto& w = testing::rhyme_words()[rng() % testing::rhyme_words().size()];
    std::set<RhymeClass> allowed{RhymeClass::kPerfect};
    if (rng() % 2) allowed.insert(RhymeClass::kImperfect);
    s.rhyme = rhyme_of("a line about " + w + "s", allowed);
  }
  return s;
}

// Independent restatement of the filter contract.
bool oracle_keep(const VerseRecord& r, const FilterSpec& s) {
  if (!s.poets.count(r.poet_id)) return false;
  if (s.syllables && *s.syllables != r.syllables) return false;
  if (s.rhyme && !s.rhyme->allowed.count(
                     shared_phonology().classify(s.rhyme->keys, r.rhyme_keys))) {
    return false;
  }
  return !s.exclude_texts.count(str::normalize_line(r.text));
}

TEST(Search, FullProbeEqualsOracle) {
  auto recs = testing::random_records(3000, 16, shared_phonology(), 3);
  auto idx = QuantizedIndex::build(recs, 40, 2);
  std::mt19937_64 rng(8);
  for (int q = 0; q < 60; ++q) {
    auto query = testing::random_embedding(16, rng);
    auto spec = random_spec(rng);
    if (q % 5 == 0) spec.exclude_texts.insert(str::normalize_line(recs[q].text));
    int k = 1 + static_cast<int>(rng() % 30);
    auto got = idx.search(query, spec, k, idx.centroid_count());
    auto want = testing::oracle_scan(
        recs, query, [&](const VerseRecord& r) { return oracle_keep(r, spec); }, k);
    EXPECT_EQ(got, want) << "query " << q;
    EXPECT_EQ(idx.exhaustive_search(query, spec, k), want);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_TRUE(filter_match(idx.record(got[i].id), spec));
      if (i) {
        EXPECT_GE(got[i - 1].score, got[i].score);
      }
    }
  }
}

TEST(Search, PartialProbeRecall) {
  auto recs = testing::random_records(4000, 32, shared_phonology(), 4);
  int cents = default_centroid_count(recs.size());
  auto idx = QuantizedIndex::build(recs, cents, 2);
  std::mt19937_64 rng(6);
  auto all_poets = poets({"poet0", "poet1", "poet2", "poet3", "poet4"});
  double recall = 0.0;
  for (int q = 0; q < 50; ++q) {
    auto query = testing::random_embedding(32, rng);
    auto got = idx.search(query, all_poets, 10, cents / 4);
    auto want = testing::oracle_scan(recs, query, [](const auto&) { return true; }, 10);
    int found = 0;
    for (const auto& h : got) {
      for (const auto& w : want) found += h.id == w.id ? 1 : 0;
    }
    recall += found / 10.0;
  }
  EXPECT_GE(recall / 50.0, 0.9);
}

TEST(Search, SyllableFilterHolds) {
  auto recs = testing::random_records(1000, 8, shared_phonology(), 5);
  auto idx = QuantizedIndex::build(recs, 10, 2);
  auto spec = poets({"poet0", "poet1", "poet2", "poet3", "poet4"});
  spec.syllables = 8;
  std::mt19937_64 rng(1);
  auto hits = idx.search(testing::random_embedding(8, rng), spec, 50, 10);
  ASSERT_FALSE(hits.empty());
  for (const auto& h : hits) EXPECT_EQ(idx.record(h.id).syllables, 8);
}

TEST(Audit, CountsWholeGroups) {
  std::vector<VerseRecord> recs;
  std::vector<std::string> texts{"the red door",  "a red door opens", "no door",
                                 "red sky",       "Red, the DOOR",    "blue",
                                 "the door is red"};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    VerseRecord r;
    r.id = static_cast<RecordId>(i);
    r.poet_id = "p";
    r.text = texts[i];
    r.embedding = {0.1f, 0.2f};
    recs.push_back(r);
  }
  auto idx = QuantizedIndex::build(recs, 2, 1);
  phonology::Verbalizer v;
  EXPECT_EQ(idx.audit({"green"}, v).count, 0u);
  EXPECT_TRUE(idx.audit({"green"}, v).samples.empty());
  auto both = idx.audit({"red", "door"}, v);
  EXPECT_EQ(both.count, 4u);
  EXPECT_EQ(both.samples, (std::vector<RecordId>{0, 1, 4, 6}));
  auto one = idx.audit({"door"}, v);
  std::size_t scan = 0;
  for (const auto& t : texts) {
    auto tok = v.verbalize(t);
    scan += std::count(tok.begin(), tok.end(), "door") > 0 ? 1 : 0;
  }
  EXPECT_EQ(one.count, scan);
}

TEST(Audit, SamplesAreCapped) {
  auto recs = testing::random_records(300, 4, shared_phonology(), 9);
  auto idx = QuantizedIndex::build(recs, 4, 1);
  auto r = idx.audit({"line"}, phonology::Verbalizer{});
  EXPECT_EQ(r.count, 300u);
  EXPECT_EQ(r.samples.size(), kAuditSamples);
}

TEST(Serialization, RoundTripIsExact) {
  testing::TempDir dir;
  auto recs = testing::random_records(500, 12, shared_phonology(), 7);
  recs[4].rhyme_keys.clear();
  recs[5].text = "caf\xC3\xA9 by the sea";
  auto idx = QuantizedIndex::build(recs, 9, 3);
  idx.save(dir.path() / "i.bin");
  auto back = QuantizedIndex::load(dir.path() / "i.bin");
  EXPECT_EQ(back.records(), idx.records());
  EXPECT_EQ(back.centroids(), idx.centroids());
  EXPECT_EQ(back.postings(), idx.postings());
  EXPECT_EQ(back.nprobe_default(), idx.nprobe_default());
  back.save(dir.path() / "j.bin");
  EXPECT_EQ(read_file(dir.path() / "i.bin"), read_file(dir.path() / "j.bin"));

  auto bytes = read_file(dir.path() / "i.bin");
  dir.write("short.bin", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(QuantizedIndex::load(dir.path() / "short.bin"), Error);
  dir.write("magic.bin", "NOTANIDX" + bytes.substr(8));
  EXPECT_THROW(QuantizedIndex::load(dir.path() / "magic.bin"), Error);
  EXPECT_THROW(QuantizedIndex::load(dir.path() / "missing.bin"), Error);
}

TEST(Stats, PoetCounts) {
  auto recs = testing::random_records(200, 4, shared_phonology(), 1, 3);
  auto idx = QuantizedIndex::build(recs, 2, 1);
  std::size_t total = 0;
  for (const auto& [poet, n] : idx.poet_counts()) total += n;
  EXPECT_EQ(total, 200u);
  EXPECT_EQ(idx.poet_counts().size(), 3u);
}

}  // namespace
}  // namespace versekit::index
