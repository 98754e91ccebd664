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

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "versekit/filters.hpp"

namespace versekit::filters {
namespace {

using testing::shared_phonology;

PosTagger toy_tagger() {
  PosTagger t;
  t.add("the", PosTag::kDet);
  t.add("cat", PosTag::kNoun);
  t.add("sleeps", PosTag::kVerb);
  t.add("dog", PosTag::kNoun);
  t.add("runs", PosTag::kVerb);
  t.add("a", PosTag::kDet);
  return t;
}

const PosTagger& shipped_tagger() {
  static const PosTagger t = PosTagger::from_file(
      testing::data_dir() / "lexicons" / "pos_lexicon.tsv",
      phonology::Verbalizer::from_file(testing::data_dir() / "phonology" /
                                       "verbalization_rules.tsv"));
  return t;
}

TEST(PosTagger, SpecExamples) {
  auto t = toy_tagger();
  EXPECT_EQ(fingerprint(t.tag("the cat sleeps")), "DET-NOUN-VERB");
  EXPECT_TRUE(t.tag("").empty());
  EXPECT_EQ(t.tag_word("glorfing"), PosTag::kVerb);
}

TEST(PosTagger, SuffixRulesAndTotality) {
  auto t = toy_tagger();
  EXPECT_EQ(t.tag_word("quickly"), PosTag::kAdv);
  EXPECT_EQ(t.tag_word("kindness"), PosTag::kNoun);
  EXPECT_EQ(t.tag_word("wondrous"), PosTag::kAdj);
  EXPECT_EQ(t.tag_word("cats"), PosTag::kNoun);
  EXPECT_EQ(t.tag_word("blorp"), PosTag::kNoun);
  EXPECT_EQ(t.tag_word("seven"), PosTag::kNum);
  // One tag per verbalized token, numerals included.
  EXPECT_EQ(t.tag("the 2 cats").size(), 3u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    for (int j = 0; j < 20; ++j) s += static_cast<char>(32 + rng() % 95);
    EXPECT_EQ(t.tag(s).size(), t.verbalizer().verbalize(s).size());
  }
}

TEST(PosTagger, ShippedLexiconLoads) {
  const auto& t = shipped_tagger();
  EXPECT_EQ(t.tag_word("the"), PosTag::kDet);
  EXPECT_EQ(t.tag_word("and"), PosTag::kConj);
}

TEST(Fingerprints, SetSemantics) {
  auto t = toy_tagger();
  auto three = corpus::parse_corpus(
      "#poet: p\nthe cat sleeps\na dog\nruns\n", corpus::SourceTag::kPoetic);
  EXPECT_EQ(build_fingerprints(three, t).size(), 3u);
  auto same = corpus::parse_corpus("#poet: p\nthe cat sleeps\na dog runs\n",
                                   corpus::SourceTag::kPoetic);
  EXPECT_EQ(build_fingerprints(same, t).size(), 1u);
  EXPECT_TRUE(build_fingerprints(corpus::Corpus{}, t).empty());
}

TEST(Balance, ParenthesesAndQuotes) {
  EXPECT_FALSE(balanced("(hello there"));
  EXPECT_FALSE(balanced("hello) (there"));
  EXPECT_FALSE(balanced("she said \"go"));
  EXPECT_FALSE(balanced("\xE2\x80\x9Copen only"));
  EXPECT_TRUE(balanced("(a) \"b\" \xE2\x80\x9C" "c\xE2\x80\x9D"));
  EXPECT_TRUE(balanced("plain"));
}

struct Fixture {
  PosTagger tagger = toy_tagger();
  FingerprintSet fps;
  FilterConfig cfg;

  Fixture() {
    auto human = corpus::parse_corpus(
        "#poet: p\nthe cat sleeps\nthe dog runs\n", corpus::SourceTag::kPoetic);
    fps = build_fingerprints(human, tagger);
    cfg.min_syllables = 1;
    cfg.max_syllables = 6;
    cfg.blocklist = {"damn"};
    cfg.combo_blocklist = {{"cat", "dog"}};
    cfg.originality_index = build_originality_index(human);
  }

  std::optional<FilterKind> check(const std::string& poet,
                                  const std::string& text) const {
    return first_failure({poet, text}, cfg, fps, tagger, shared_phonology());
  }
};

TEST(ApplyFilters, EachFilterFires) {
  Fixture f;
  EXPECT_EQ(f.check("p", "(hello there"), FilterKind::kBalance);
  EXPECT_EQ(f.check("p", "the cat sleeps on the warm mat all day"),
            FilterKind::kSyllables);
  EXPECT_EQ(f.check("p", "the damn runs"), FilterKind::kBlocklist);
  EXPECT_EQ(f.check("p", "The cat, sleeps!"), FilterKind::kOriginality);
  EXPECT_EQ(f.check("q", "The cat, sleeps!"), std::nullopt);  // other poet
  EXPECT_EQ(f.check("p", "sleeps the cat the"), FilterKind::kPos);
  EXPECT_EQ(f.check("p", "the cat dog"), FilterKind::kPos);
  EXPECT_EQ(f.check("p", "a dog sleeps"), std::nullopt);
}

TEST(ApplyFilters, ComboNeedsWholeGroup) {
  Fixture f;
  f.fps.insert("DET-NOUN-NOUN");
  EXPECT_EQ(f.check("p", "the cat dog"), FilterKind::kCombo);
  EXPECT_EQ(f.check("p", "the cat cat"), std::nullopt);
}

TEST(ApplyFilters, FirstFailureWinsAndCountsReconcile) {
  Fixture f;
  std::vector<Verse> in{{"p", "(the damn"},         // balance before blocklist
                        {"p", "the dog runs"},       // originality
                        {"p", "a cat runs"},         // kept
                        {"p", "runs runs runs"},     // pos
                        {"p", "a dog sleeps"}};      // kept
  auto r = apply_filters(in, f.cfg, f.fps, f.tagger, shared_phonology());
  EXPECT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.report.counts[static_cast<std::size_t>(FilterKind::kBalance)], 1u);
  EXPECT_EQ(r.report.counts[static_cast<std::size_t>(FilterKind::kBlocklist)], 0u);
  EXPECT_EQ(r.report.counts[static_cast<std::size_t>(FilterKind::kOriginality)], 1u);
  EXPECT_EQ(r.report.counts[static_cast<std::size_t>(FilterKind::kPos)], 1u);
  EXPECT_EQ(r.report.rejected() + r.report.kept, r.report.input);
}

TEST(ApplyFilters, OrderIndependentAndMonotoneInFingerprints) {
  Fixture f;
  std::vector<Verse> in;
  std::vector<std::string> words{"the", "a", "cat", "dog", "runs", "sleeps",
                                 "damn", "(", "\""};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    std::string s;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < n; ++j) s += (j ? " " : "") + words[rng() % words.size()];
    in.push_back({i % 2 ? "p" : "q", s});
  }
  auto base = apply_filters(in, f.cfg, f.fps, f.tagger, shared_phonology());
  EXPECT_EQ(base.report.rejected() + base.report.kept, in.size());
  auto shuffled = in;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto again = apply_filters(shuffled, f.cfg, f.fps, f.tagger, shared_phonology());
  auto a = base.kept, b = again.kept;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);

  auto bigger = f.fps;
  bigger.insert("NOUN-NOUN");
  bigger.insert("DET-DET-NOUN");
  auto more = apply_filters(in, f.cfg, bigger, f.tagger, shared_phonology());
  std::set<Verse> more_set(more.kept.begin(), more.kept.end());
  for (const auto& v : base.kept) EXPECT_TRUE(more_set.count(v)) << v.text;
}

TEST(ApplyFilters, HumanLinesMostlySurvive) {
  auto c = corpus::load_corpus_dir(testing::data_dir() / "corpus" / "poetic",
                                   corpus::SourceTag::kPoetic);
  corpus::Corpus train, held;
  for (std::size_t i = 0; i < c.poems.size(); ++i) {
    (i % 10 == 3 ? held : train).poems.push_back(c.poems[i]);
  }
  const auto& tagger = shipped_tagger();
  FilterConfig cfg;
  cfg.load_lists(testing::data_dir() / "lexicons" / "blocklist.txt",
                 testing::data_dir() / "lexicons" / "combo_blocklist.txt");
  cfg.originality_index = build_originality_index(train);
  auto fps = build_fingerprints(train, tagger);
  std::vector<Verse> verses;
  for (const auto& p : held.poems) {
    for (const auto& s : p.stanzas) {
      for (const auto& l : s) verses.push_back({p.poet_id, l});
    }
  }
  auto r = apply_filters(verses, cfg, fps, tagger, shared_phonology());
  double kept = static_cast<double>(r.kept.size()) / verses.size();
  EXPECT_GE(kept, 0.95);
}

}  // namespace
}  // namespace versekit::filters
