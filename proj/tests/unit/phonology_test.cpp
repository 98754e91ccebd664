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
#include <map>
#include <random>
#include <set>

#include "test_support.hpp"
#include "versekit/phonology.hpp"

namespace versekit::phonology {
namespace {

using testing::shared_phonology;

std::vector<std::string> words(std::initializer_list<const char*> w) {
  return {w.begin(), w.end()};
}

TEST(Phone, ParseRoundTrip) {
  for (std::string s : {"AA0", "AA1", "IY2", "ZH", "NG", "ER0", "HH"}) {
    auto p = Phone::parse(s);
    ASSERT_TRUE(p) << s;
    EXPECT_EQ(p->str(), s);
  }
  EXPECT_FALSE(Phone::parse("XX"));
  EXPECT_EQ(Phone::parse("AA")->str(), "AA0");  // bare vowel is unstressed
  EXPECT_FALSE(Phone::parse("T1"));
  EXPECT_TRUE(Phone::parse("IY1")->is_vowel());
  EXPECT_FALSE(Phone::parse("S")->is_vowel());
}

TEST(Verbalizer, SpecExamples) {
  const auto& ph = shared_phonology();
  EXPECT_EQ(ph.verbalize("He has 2 cats"), words({"he", "has", "two", "cats"}));
  auto cents = ph.verbalize("$.50");
  ASSERT_FALSE(cents.empty());
  EXPECT_EQ(cents.back(), "cents");
  EXPECT_EQ(cents, words({"fifty", "cents"}));
  EXPECT_TRUE(ph.verbalize("").empty());
}

TEST(Verbalizer, NumbersAndSymbols) {
  Verbalizer v;
  EXPECT_EQ(v.verbalize("21st"), words({"twenty", "first"}));
  EXPECT_EQ(v.verbalize("$1.50"),
            words({"one", "dollar", "and", "fifty", "cents"}));
  EXPECT_EQ(v.verbalize("1,204"),
            words({"one", "thousand", "two", "hundred", "four"}));
  EXPECT_EQ(v.verbalize("in 1922"), words({"in", "nineteen", "twenty", "two"}));
  EXPECT_EQ(v.verbalize("3.5"), words({"three", "point", "five"}));
  EXPECT_EQ(v.verbalize("Don't stop!"), words({"don't", "stop"}));
  v.add_rule("&", "and");
  EXPECT_EQ(v.verbalize("salt & sea"), words({"salt", "and", "sea"}));
}

TEST(Verbalizer, RulesFromDataFile) {
  const auto& ph = shared_phonology();
  EXPECT_EQ(ph.verbalize("rock & roll"), words({"rock", "and", "roll"}));
  EXPECT_EQ(ph.verbalize("o'er the hill"), words({"over", "the", "hill"}));
}

TEST(NumberWords, Cardinals) {
  EXPECT_EQ(cardinal_words(0), words({"zero"}));
  EXPECT_EQ(cardinal_words(15), words({"fifteen"}));
  EXPECT_EQ(cardinal_words(40), words({"forty"}));
  EXPECT_EQ(cardinal_words(101), words({"one", "hundred", "one"}));
  EXPECT_EQ(cardinal_words(2000000), words({"two", "million"}));
  EXPECT_EQ(ordinal_words(12), words({"twelfth"}));
  EXPECT_EQ(ordinal_words(40), words({"fortieth"}));
  EXPECT_EQ(year_words(1905), words({"nineteen", "oh", "five"}));
  EXPECT_EQ(year_words(1900), words({"nineteen", "hundred"}));
}

TEST(Phonemize, MultiplePronunciations) {
  const auto& ph = shared_phonology();
  auto prons = ph.phonemize("read");
  std::set<std::string> got;
  for (const auto& p : prons) got.insert(to_string(p));
  EXPECT_TRUE(got.count("R IY1 D"));
  EXPECT_TRUE(got.count("R EH1 D"));
}

TEST(Phonemize, OutOfVocabularyFallsBackToRules) {
  const auto& ph = shared_phonology();
  auto prons = ph.phonemize("glorfing");
  ASSERT_EQ(prons.size(), 1u);
  EXPECT_EQ(vowel_count(prons[0]), 2);
  EXPECT_EQ(to_string(letter_to_sound("blick")), "B L IH1 K");
}

TEST(Phonemize, TotalOverRandomAlphabeticTokens) {
  const auto& ph = shared_phonology();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 12), letter(0, 25);
  for (int i = 0; i < 2000; ++i) {
    std::string w;
    int n = len(rng);
    for (int j = 0; j < n; ++j) w += static_cast<char>('a' + letter(rng));
    auto prons = ph.phonemize(w);
    ASSERT_FALSE(prons.empty()) << w;
    for (const auto& p : prons) EXPECT_GE(vowel_count(p), 1) << w;
  }
}

TEST(SyllableCount, SpecExamples) {
  const auto& ph = shared_phonology();
  // Hand oracle: whether(2) I(1) travel(2) by(1) land(1) or(1) by(1) sea(1).
  EXPECT_EQ(ph.syllable_count("Whether I travel by land or by sea"), 10);
  EXPECT_EQ(ph.syllable_count(""), 0);
  EXPECT_EQ(ph.syllable_count("pocket"), 2);
}

TEST(SyllableCount, AdditiveOverConcatenation) {
  const auto& ph = shared_phonology();
  std::vector<std::string> lines = {
      "The quiet river runs beneath the hill",
      "O wind, 3 times you called my name!",
      "and $1.50 for the ferry",
      "",
      "Shall I compare thee to a summer's day?",
      "glorfing snarfles in the twilight",
  };
  for (const auto& a : lines) {
    for (const auto& b : lines) {
      EXPECT_EQ(ph.syllable_count(a + " " + b),
                ph.syllable_count(a) + ph.syllable_count(b))
          << a << " | " << b;
    }
  }
}

TEST(RhymeKey, SpecExamples) {
  const auto& ph = shared_phonology();
  auto sea = ph.rhyme_key("Whether I travel by land or by sea");
  ASSERT_EQ(sea.size(), 1u);
  EXPECT_EQ(to_string(sea[0].key_phonemes), "IY1");
  EXPECT_EQ(sea[0].final_word, "sea");

  auto read = ph.rhyme_key("and then I read");
  std::set<std::string> keys;
  for (const auto& k : read) keys.insert(to_string(k.key_phonemes));
  EXPECT_EQ(keys, (std::set<std::string>{"EH1 D", "IY1 D"}));

  EXPECT_THROW(ph.rhyme_key("???"), NoRhymeKeyError);
}

TEST(RhymeKey, StressFallbackOrder) {
  // Primary wins even if a secondary comes later.
  auto keys = make_rhyme_keys("x", {parse_phonemes("AH0 B EH1 T ER2 M AH0")});
  EXPECT_EQ(to_string(keys[0].key_phonemes), "EH1 T ER2 M AH0");
  keys = make_rhyme_keys("x", {parse_phonemes("K AH2 T IY0")});
  EXPECT_EQ(to_string(keys[0].key_phonemes), "AH2 T IY0");
  keys = make_rhyme_keys("x", {parse_phonemes("DH AH0 Z IY0")});
  EXPECT_EQ(to_string(keys[0].key_phonemes), "IY0");
}

TEST(ClassifyRhyme, SpecExamples) {
  const auto& ph = shared_phonology();
  auto tide = ph.rhyme_key("tide");
  auto side = ph.rhyme_key("side");
  auto light = ph.rhyme_key("light");
  auto sea = ph.rhyme_key("sea");
  EXPECT_EQ(ph.classify(tide, side), RhymeClass::kPerfect);
  EXPECT_EQ(ph.classify(sea, sea), RhymeClass::kNone);
  EXPECT_EQ(ph.classify(light, side), RhymeClass::kImperfect);
  EXPECT_EQ(ph.classify(ph.rhyme_key("cat"), ph.rhyme_key("dog")),
            RhymeClass::kNone);
}

TEST(ClassifyRhyme, ImperfectNeedsSimilarCoda) {
  const auto& ph = shared_phonology();
  // AY1 T vs AY1 M: T and M are not similar.
  EXPECT_EQ(ph.classify(ph.rhyme_key("light"), ph.rhyme_key("time")),
            RhymeClass::kNone);
  // Shorter coda must be a suffix under similarity: "bus" (AH1 S) vs
  // "dusk" (AH1 S K) do not align from the end.
  EXPECT_EQ(ph.classify(ph.rhyme_key("bus"), ph.rhyme_key("dusk")),
            RhymeClass::kNone);
  // Unequal codas with an empty similarity table.
  ConsonantSimilarityTable t;
  RhymeKeySet a{RhymeKey{parse_phonemes("AE1 S T"), "a"}};
  RhymeKeySet b{RhymeKey{parse_phonemes("AE1 T"), "b"}};
  RhymeKeySet c{RhymeKey{parse_phonemes("AE1"), "c"}};
  EXPECT_EQ(classify_rhyme(a, b, t), RhymeClass::kImperfect);
  EXPECT_EQ(classify_rhyme(a, c, t), RhymeClass::kNone);
}

TEST(ClassifyRhyme, SymmetricOverRandomDictionaryWords) {
  const auto& ph = shared_phonology();
  std::vector<std::string> vocab;
  for (const auto& [w, _] : ph.dict().entries()) vocab.push_back(w);
  std::sort(vocab.begin(), vocab.end());
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  int rhyming = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto& a = vocab[pick(rng)];
    // Bias half of the pairs towards shared endings so the non-None branches
    // are exercised too.
    std::string b = vocab[pick(rng)];
    if (i % 2 == 0) {
      auto it = std::lower_bound(vocab.begin(), vocab.end(), a);
      if (it + 1 != vocab.end()) b = *(it + 1);
    }
    auto ka = make_rhyme_keys(a, ph.phonemize(a));
    auto kb = make_rhyme_keys(b, ph.phonemize(b));
    auto ab = classify_rhyme(ka, kb, ph.table());
    EXPECT_EQ(ab, classify_rhyme(kb, ka, ph.table())) << a << " / " << b;
    rhyming += ab != RhymeClass::kNone;
  }
  EXPECT_GT(rhyming, 0);
}

// Oracle: rhyme suffix computed directly from the dictionary text.
std::string oracle_suffix(const std::vector<std::string>& phones) {
  int at = -1;
  for (char want : {'1', '2'}) {
    for (int i = static_cast<int>(phones.size()) - 1; i >= 0 && at < 0; --i) {
      if (phones[static_cast<std::size_t>(i)].back() == want) at = i;
    }
    if (at >= 0) break;
  }
  if (at < 0) {
    for (int i = static_cast<int>(phones.size()) - 1; i >= 0 && at < 0; --i) {
      if (std::isdigit(static_cast<unsigned char>(
              phones[static_cast<std::size_t>(i)].back()))) {
        at = i;
      }
    }
  }
  std::string out;
  for (std::size_t i = static_cast<std::size_t>(at); i < phones.size(); ++i) {
    out += phones[i] + " ";
  }
  return out;
}

TEST(ClassifyRhyme, SharedSuffixIsPerfectOverDictionarySample) {
  const auto& ph = shared_phonology();
  std::map<std::string, std::vector<std::string>> by_suffix;
  std::vector<std::string> vocab;
  for (const auto& [w, _] : ph.dict().entries()) vocab.push_back(w);
  std::sort(vocab.begin(), vocab.end());
  for (const auto& w : vocab) {
    const auto& prons = *ph.dict().find(w);
    by_suffix[oracle_suffix(str::split_ws(to_string(prons.front())))]
        .push_back(w);
  }
  std::vector<const std::vector<std::string>*> groups;
  for (const auto& [_, g] : by_suffix) {
    if (g.size() >= 2) groups.push_back(&g);
  }
  ASSERT_FALSE(groups.empty());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick_group(0, groups.size() - 1);
  int checked = 0;
  while (checked < 1000) {
    const auto& g = *groups[pick_group(rng)];
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    const auto& a = g[pick(rng)];
    const auto& b = g[pick(rng)];
    if (a == b) continue;
    auto ka = make_rhyme_keys(a, ph.phonemize(a));
    auto kb = make_rhyme_keys(b, ph.phonemize(b));
    ASSERT_EQ(classify_rhyme(ka, kb, ph.table()), RhymeClass::kPerfect)
        << a << " / " << b;
    ++checked;
  }
}

TEST(SimilarityTable, DefaultPairsAndSymmetry) {
  auto t = ConsonantSimilarityTable::default_table();
  auto P = [](const char* s) { return *Phone::parse(s); };
  EXPECT_TRUE(t.similar(P("T"), P("D")));
  EXPECT_TRUE(t.similar(P("D"), P("T")));
  EXPECT_TRUE(t.similar(P("NG"), P("N")));
  EXPECT_TRUE(t.similar(P("K"), P("K")));
  EXPECT_FALSE(t.similar(P("T"), P("M")));
  const auto& loaded = shared_phonology().table();
  EXPECT_TRUE(loaded.similar(P("TH"), P("DH")));
}

TEST(PronunciationDict, LoaderHandlesVariantsAndErrors) {
  testing::TempDir dir;
  auto good = dir.write("d.dict",
                        "tomato  T AH0 M EY1 T OW2\n"
                        "tomato(2) T AH0 M AA1 T OW2 # british\n");
  auto d = PronunciationDict::load(good);
  ASSERT_NE(d.find("tomato"), nullptr);
  EXPECT_EQ(d.find("tomato")->size(), 2u);
  EXPECT_EQ(d.find("TOMATO"), d.find("tomato"));

  auto bad = dir.write("bad.dict", "ok  OW1 K EY1\nnope  N QQ1 P\n");
  try {
    PronunciationDict::load(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace versekit::phonology
