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

#include "test_support.hpp"
#include "versekit/corpus.hpp"

namespace versekit::corpus {
namespace {

const char* kTwoPoems =
    "#poet: whitman\n"
    "#title: Leaves\n"
    "I celebrate myself\n"
    "and sing myself\n"
    "\n"
    "what I assume\n"
    "you shall assume\n"
    "#poet: dickinson\n"
    "Because I could not stop\n"
    "He kindly stopped for me\n";

TEST(ParseCorpus, StanzasAndTitles) {
  auto c = parse_corpus(kTwoPoems, SourceTag::kPoetic);
  ASSERT_EQ(c.poems.size(), 2u);
  EXPECT_EQ(c.poems[0].poet_id, "whitman");
  EXPECT_EQ(c.poems[0].title, "Leaves");
  EXPECT_EQ(c.poems[0].stanzas.size(), 2u);
  EXPECT_FALSE(c.poems[1].title.has_value());
  EXPECT_EQ(c.line_count(), 6u);
  EXPECT_EQ(c.poet_ids(), (std::set<std::string>{"dickinson", "whitman"}));
  EXPECT_EQ(c.for_poet("dickinson").line_count(), 2u);
}

TEST(ParseCorpus, MissingHeaderReportsLineOne) {
  try {
    parse_corpus("a verse without header\n", SourceTag::kPoetic, "f.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParseCorpus, MalformedHeaderReportsItsLine) {
  try {
    parse_corpus("#poet: a\nline\n#poet whitman\nx\n", SourceTag::kPoetic);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseCorpus, EmptyInputs) {
  EXPECT_THROW(parse_corpus("", SourceTag::kPoetic), EmptyCorpusError);
  EXPECT_THROW(parse_corpus("\n\n  \n", SourceTag::kPoetic), EmptyCorpusError);
  EXPECT_THROW(parse_corpus("#poet: a\n\n", SourceTag::kPoetic), ParseError);
}

TEST(ExtractPairs, WithinStanzasOnly) {
  auto c = parse_corpus(kTwoPoems, SourceTag::kPoetic);
  auto pairs = extract_pairs(c);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].parent, "I celebrate myself");
  EXPECT_EQ(pairs[0].child, "and sing myself");
  EXPECT_EQ(pairs[1].parent, "what I assume");
  for (const auto& p : pairs) {
    EXPECT_NE(p.parent, "and sing myself");  // last line of a stanza
  }
}

TEST(ExtractPairs, FourLineStanzaGivesThreePairs) {
  auto c = parse_corpus("#poet: p\na\nb\nc\nd\n", SourceTag::kPoetic);
  EXPECT_EQ(extract_pairs(c).size(), 3u);
}

TEST(LoadCorpusDir, ShippedPoeticCorpus) {
  auto c = load_corpus_dir(testing::data_dir() / "corpus" / "poetic",
                           SourceTag::kPoetic);
  EXPECT_EQ(c.poet_ids().size(), 12u);
  EXPECT_GT(c.line_count(), 1000u);
  auto comments = load_corpus_dir(testing::data_dir() / "corpus" / "comments",
                                  SourceTag::kComments);
  auto pairs = extract_pairs(comments);
  ASSERT_FALSE(pairs.empty());
  EXPECT_EQ(pairs.front().source_tag, SourceTag::kComments);
}

TEST(Augment, DemographicMentionAlwaysRewritten) {
  std::set<std::string> demo{"women"};
  std::map<std::string, std::string> sentiment{{"hatred", "love"}};
  std::vector<VersePair> pairs{{"the women walked", "full of hatred", {}}};
  auto out = augment_positivize(pairs, sentiment, demo, 0.0, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].child, "full of love");
  EXPECT_EQ(out[0].parent, pairs[0].parent);
}

TEST(Augment, FractionZeroWithoutMentionsIsIdentity) {
  std::vector<VersePair> pairs{{"a", "Hatred!", {}}, {"b", "no hatred", {}}};
  auto out = augment_positivize(pairs, {{"hatred", "love"}}, {"women"}, 0.0, 9);
  EXPECT_EQ(out, pairs);
  auto all = augment_positivize(pairs, {{"hatred", "love"}}, {}, 1.0, 9);
  EXPECT_EQ(all[0].child, "Love!");
  EXPECT_EQ(all[1].child, "no love");
}

TEST(Augment, Idempotent) {
  std::map<std::string, std::string> sentiment{{"hatred", "love"},
                                               {"cruel", "kind"}};
  std::vector<VersePair> pairs;
  for (int i = 0; i < 50; ++i) {
    pairs.push_back({"line " + std::to_string(i), "cruel hatred " +
                                                      std::to_string(i), {}});
  }
  auto once = augment_positivize(pairs, sentiment, {}, 0.3, 42);
  auto twice = augment_positivize(once, sentiment, {}, 0.3, 42);
  EXPECT_EQ(once, twice);
  EXPECT_THROW(augment_positivize(pairs, sentiment, {}, 1.5, 42), Error);
}

TEST(Demographic, UsesVerbalizedTokens) {
  std::set<std::string> demo{"women", "men"};
  EXPECT_TRUE(detect_demographic_mention("The Women, singing", demo));
  EXPECT_FALSE(detect_demographic_mention("Menace walks", demo));
}

}  // namespace
}  // namespace versekit::corpus
