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
#include <cmath>
#include <numeric>

#include "grad_check.hpp"
#include "test_support.hpp"
#include "toy_lm.hpp"
#include "versekit/generator.hpp"

namespace versekit::generator {
namespace {

using testing::enumerate_paths;
using testing::TableLm;
using testing::ToyLm;

const corpus::Corpus& desk_corpus() {
  static const corpus::Corpus c = corpus::load_corpus_dir(
      testing::data_dir() / "corpus" / "poetic", corpus::SourceTag::kPoetic);
  return c;
}

const SubwordModel& desk_tokenizer() {
  static const SubwordModel sp = train_tokenizer(desk_corpus(), 512);
  return sp;
}

// ---------------------------------------------------------------- tokenizer

TEST(Tokenizer, EveryTrainingLineRoundTrips) {
  const auto& sp = desk_tokenizer();
  EXPECT_EQ(sp.size(), 512);
  for (const auto& line : desk_corpus().lines()) {
    auto ids = sp.tokenize(line);
    ASSERT_EQ(sp.detokenize(ids), line);
    EXPECT_EQ(std::count(ids.begin(), ids.end(), SubwordModel::kEnd), 1);
  }
}

TEST(Tokenizer, SmallVocabularyOnTinyCorpusRoundTrips) {
  std::vector<std::string> lines;
  for (int i = 0; i < 40; ++i) {
    lines.push_back("the cat sat on the mat number " + std::to_string(i));
    lines.push_back("a dog ran past the barn at dawn " + std::to_string(i % 7));
  }
  auto sp = train_tokenizer(lines, 64);
  EXPECT_EQ(sp.size(), 64);
  for (const auto& l : lines) EXPECT_EQ(sp.detokenize(sp.tokenize(l)), l);
}

TEST(Tokenizer, EmptyLineIsStartEndOnly) {
  const auto& sp = desk_tokenizer();
  EXPECT_EQ(sp.tokenize(""),
            (std::vector<TokenId>{SubwordModel::kStart, SubwordModel::kEnd}));
}

TEST(Tokenizer, UnseenBytesFallBackAndRoundTrip) {
  const auto& sp = desk_tokenizer();
  const std::vector<std::string> samples{
      "zyx\x01\x7f", "\xce\xa9mega \xe2\x80\x94 q",
      std::string("nul\0byte", 8), "~~~|||"};
  for (const auto& s : samples) {
    auto ids = sp.encode(s);
    EXPECT_EQ(sp.detokenize(ids), s);
    EXPECT_EQ(std::count(ids.begin(), ids.end(), SubwordModel::kEnd), 0);
    EXPECT_EQ(std::count(ids.begin(), ids.end(), SubwordModel::kStart), 0);
  }
  auto ids = sp.encode("\x01");
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_EQ(ids[0], SubwordModel::kEscape);
}

TEST(Tokenizer, RandomStringsRoundTrip) {
  const auto& sp = desk_tokenizer();
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 40);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    int n = len(rng);
    for (int j = 0; j < n; ++j) s += static_cast<char>(byte(rng));
    ASSERT_EQ(sp.detokenize(sp.tokenize(s)), s);
  }
}

TEST(Tokenizer, VocabularyLimits) {
  std::vector<std::string> tiny{"a b", "a b"};
  EXPECT_THROW(train_tokenizer(tiny, 32), TrainingError);
  EXPECT_THROW(train_tokenizer(tiny, 64), TrainingError);  // over budget
  EXPECT_THROW(train_tokenizer(desk_corpus(), 1'000'000), TrainingError);
}

TEST(Tokenizer, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const auto& sp = desk_tokenizer();
  sp.save(dir.path() / "sp.bin");
  auto back = SubwordModel::load(dir.path() / "sp.bin");
  ASSERT_EQ(back.size(), sp.size());
  for (const auto& line : desk_corpus().lines()) {
    EXPECT_EQ(back.encode(line), sp.encode(line));
  }
  dir.write("bad.bin", "NOTMAGIC........");
  EXPECT_THROW(SubwordModel::load(dir.path() / "bad.bin"), FormatError);
}

TEST(Tokenizer, DeterministicTraining) {
  auto a = train_tokenizer(desk_corpus(), 300);
  auto b = train_tokenizer(desk_corpus(), 300);
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a.piece(i), b.piece(i));
}

// ---------------------------------------------------------------- expansion

GenConfig expansion_config(double threshold, int iterations,
                           std::int64_t beam = GenConfig::kUnlimited) {
  GenConfig cfg;
  cfg.threshold = threshold;
  cfg.max_iterations = iterations;
  cfg.beam_cap = beam;
  return cfg;
}

TEST(Expand, ThresholdKeepsNearTies) {
  // Tokens: 0 x, 1 y, 2 z, 3 end.
  TableLm lm({{0.50, 0.47, 0.03, 0.0}, {0.0, 0.0, 0.0, 1.0}}, 3);
  auto out = expand_tokens(lm, {0}, expansion_config(0.925, 5));
  EXPECT_EQ(out, (std::set<std::vector<TokenId>>{{0, 0}, {0, 1}}));
}

TEST(Expand, DeterministicChainYieldsOneVerse) {
  TableLm lm({{0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}}, 4);
  auto out = expand_tokens(lm, {1}, expansion_config(0.925, 10));
  EXPECT_EQ(out, (std::set<std::vector<TokenId>>{{1, 2, 3}}));
}

TEST(Expand, MatchesEnumerationOnFiveTokenToy) {
  ToyLm lm(5, 4, 2024);
  auto got = expand_tokens(lm, {0, 1}, expansion_config(0.5, 4));
  auto want = enumerate_paths(lm, {0, 1}, 0.5, 4);
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(got, want);
}

TEST(Expand, MatchesEnumerationOnRandomToys) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    int vocab = 3 + static_cast<int>(rng() % 6);  // 3..8
    int iters = 1 + static_cast<int>(rng() % 5);   // 1..5
    ToyLm lm(vocab, vocab - 1, rng());
    std::set<TokenId> starts{0, static_cast<TokenId>(rng() % (vocab - 1))};
    for (double th : {0.925, 0.9, 0.6}) {
      ASSERT_EQ(expand_tokens(lm, starts, expansion_config(th, iters)),
                enumerate_paths(lm, starts, th, iters))
          << "trial " << trial << " threshold " << th;
    }
  }
}

TEST(Expand, RaisingThresholdNeverAddsVerses) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    ToyLm lm(8, 7, rng());
    auto lo = expand_tokens(lm, {0, 1, 2}, expansion_config(0.90, 5));
    auto hi = expand_tokens(lm, {0, 1, 2}, expansion_config(0.95, 5));
    EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
  }
}

TEST(Expand, BeamCapLimitsPartialsOnly) {
  ToyLm lm(8, 7, 99);
  auto full = expand_tokens(lm, {0, 1, 2}, expansion_config(0.6, 5));
  auto capped = expand_tokens(lm, {0, 1, 2}, expansion_config(0.6, 5, 2));
  EXPECT_TRUE(std::includes(full.begin(), full.end(), capped.begin(), capped.end()));
  EXPECT_LT(capped.size(), full.size());
  // Capped run is deterministic.
  EXPECT_EQ(capped, expand_tokens(lm, {0, 1, 2}, expansion_config(0.6, 5, 2)));
}

TEST(Expand, StartsThatAreEndTokensAreIgnored) {
  ToyLm lm(4, 3, 1);
  EXPECT_TRUE(expand_tokens(lm, {3}, expansion_config(0.9, 3)).empty());
}

TEST(Expand, ConfigValidation) {
  ToyLm lm(4, 3, 1);
  EXPECT_THROW(expand_tokens(lm, {0}, expansion_config(0.0, 3)), Error);
  EXPECT_THROW(expand_tokens(lm, {0}, expansion_config(0.5, 0)), Error);
  EXPECT_THROW(expand_tokens(lm, {0}, expansion_config(0.5, 3, 0)), Error);
}

// ----------------------------------------------------------- start tokens

TEST(StartingTokens, OwnInitialsPlusWidelySharedOnes) {
  std::map<std::string, corpus::Corpus> corpora;
  std::vector<std::string> all_lines;
  for (int p = 0; p < 22; ++p) {
    std::string text = "#poet: p" + std::to_string(p) + "\n";
    std::vector<std::string> lines{"and the river " + std::to_string(p)};
    if (p < 12) lines.push_back("Moon rises over water");
    if (p < 11) lines.push_back("Kite drifts over water");
    if (p == 21) {
      lines.push_back("The hills are green");
      lines.push_back("O wind of night");
    }
    for (auto& l : lines) text += l + "\n";
    all_lines.insert(all_lines.end(), lines.begin(), lines.end());
    corpora["p" + std::to_string(p)] =
        corpus::parse_corpus(text, corpus::SourceTag::kPoetic);
  }
  for (int i = 0; i < 3; ++i) all_lines.insert(all_lines.end(), all_lines.begin(), all_lines.end());
  auto sp = train_tokenizer(all_lines, 64);
  GenConfig cfg;
  auto first = [&](const std::string& s) { return sp.encode(s).front(); };
  ASSERT_NE(first("Kite drifts"), first("Moon rises"));

  auto starts = starting_tokens("p21", corpora, sp, cfg);
  EXPECT_TRUE(starts.count(first("The hills")));
  EXPECT_TRUE(starts.count(first("O wind")));
  EXPECT_TRUE(starts.count(first("Moon rises")));   // 12 of 22 poets
  EXPECT_FALSE(starts.count(first("Kite drifts")));  // 11 of 22 poets
  EXPECT_THROW(starting_tokens("nobody", corpora, sp, cfg), Error);
}

// --------------------------------------------------------- language model

GenConfig tiny_lm_config(int vocab) {
  GenConfig cfg;
  cfg.vocab_size = vocab;
  cfg.layers = 1;
  cfg.heads = 2;
  cfg.hidden = 16;
  cfg.feed_forward = 32;
  cfg.max_len = 24;
  cfg.dropout = 0.0;
  cfg.batch_size = 32;
  cfg.warmup_steps = 20;
  cfg.lr_factor = 2.0;
  return cfg;
}

TEST(LanguageModel, InitialLossIsNearLogVocab) {
  const auto& sp = desk_tokenizer();
  LanguageModel lm(tiny_lm_config(sp.size()).transformer(), 3);
  auto lines = encode_lines(sp, desk_corpus().lines());
  lines.resize(200);
  double loss = lm.sequence_loss(lines, false);
  EXPECT_NEAR(loss, std::log(sp.size()), 0.05 * std::log(sp.size()));
}

TEST(LanguageModel, DistributionsSumToOne) {
  LanguageModel lm(tiny_lm_config(64).transformer(), 1);
  std::mt19937_64 rng(2);
  std::vector<std::vector<TokenId>> prefixes{{}};
  for (int i = 0; i < 30; ++i) {
    std::vector<TokenId> p;
    int n = 1 + static_cast<int>(rng() % 40);  // some exceed the window
    for (int j = 0; j < n; ++j) p.push_back(static_cast<TokenId>(rng() % 64));
    prefixes.push_back(p);
  }
  for (const auto& d : lm.next_distributions(prefixes)) {
    double s = std::accumulate(d.begin(), d.end(), 0.0);
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(LanguageModel, GradientsMatchFiniteDifferences) {
  GenConfig cfg = tiny_lm_config(9);
  cfg.hidden = 8;
  cfg.feed_forward = 8;
  cfg.max_len = 6;
  LanguageModel lm(cfg.transformer(), 4);
  auto params = lm.parameters();
  ASSERT_LE(nn::count_parameters(params), 1000u);
  // Non-trivial output weights so every path carries gradient.
  std::mt19937_64 rng(8);
  params.back()->value = nn::normal(1, 9, 0.3, rng);
  params[params.size() - 2]->value = nn::normal(8, 9, 0.3, rng);
  std::vector<std::vector<TokenId>> lines{{3, 5, 7}, {8, 2}, {4, 4, 6, 5, 3, 2, 7}};
  nn::zero_grads(params);
  lm.sequence_loss(lines, true);
  auto results = testing::finite_difference_check(
      params, [&] { return lm.sequence_loss(lines, false); });
  for (const auto& r : results) EXPECT_LT(r.rel_error, 1e-3) << r.name;
}

TEST(LanguageModel, MemorizesSingleLine) {
  const auto& sp = desk_tokenizer();
  GenConfig cfg = tiny_lm_config(sp.size());
  cfg.epochs_pretrain = 200;
  cfg.batch_size = 1;
  auto line = sp.encode("a b");
  auto lm = pretrain({line}, cfg, 11);
  // Greedy decoding reproduces the line.
  std::vector<TokenId> prefix;
  for (int i = 0; i < 6; ++i) {
    auto d = lm.next_distributions({prefix}).front();
    auto t = static_cast<TokenId>(std::max_element(d.begin(), d.end()) - d.begin());
    if (t == SubwordModel::kEnd) break;
    prefix.push_back(t);
  }
  EXPECT_EQ(sp.detokenize(prefix), "a b");
}

TEST(LanguageModel, PretrainLossDecreasesAndIsDeterministic) {
  const auto& sp = desk_tokenizer();
  GenConfig cfg = tiny_lm_config(sp.size());
  cfg.epochs_pretrain = 3;
  cfg.dropout = 0.1;
  auto lines = encode_lines(sp, desk_corpus().lines());
  lines.resize(300);
  TrainingStats stats;
  auto a = pretrain(lines, cfg, 21, &stats);
  ASSERT_EQ(stats.epoch_losses.size(), 3u);
  EXPECT_LT(stats.epoch_losses.back(), stats.epoch_losses.front());
  auto b = pretrain(lines, cfg, 21);
  auto va = a.parameter_values(), vb = b.parameter_values();
  for (std::size_t i = 0; i < va.size(); ++i) EXPECT_EQ(*va[i], *vb[i]);
}

TEST(LanguageModel, FinetuneCopiesAndImproves) {
  const auto& sp = desk_tokenizer();
  GenConfig cfg = tiny_lm_config(sp.size());
  cfg.epochs_pretrain = 2;
  auto all = encode_lines(sp, desk_corpus().lines());
  auto base = pretrain(all, cfg, 5);
  auto before = base.parameter_values();
  std::vector<nn::Matrix> snapshot;
  for (auto* m : before) snapshot.push_back(*m);

  cfg.epochs_finetune = 0;
  auto same = finetune(base, all, cfg, 6);
  auto vs = same.parameter_values();
  for (std::size_t i = 0; i < vs.size(); ++i) EXPECT_EQ(*vs[i], snapshot[i]);

  // Poet A: held-out lines from the same poet.
  auto poet = desk_corpus().for_poet("ashgrove").lines();
  std::vector<std::string> train_lines(poet.begin(), poet.end() - 20);
  std::vector<std::string> held(poet.end() - 20, poet.end());
  cfg.epochs_finetune = 6;
  auto tuned = finetune(base, encode_lines(sp, train_lines), cfg, 6);
  auto held_ids = encode_lines(sp, held);
  EXPECT_LT(tuned.sequence_loss(held_ids, false),
            base.sequence_loss(held_ids, false));
  auto after = base.parameter_values();
  for (std::size_t i = 0; i < after.size(); ++i) EXPECT_EQ(*after[i], snapshot[i]);
}

TEST(LanguageModel, SaveLoadRoundTrip) {
  testing::TempDir dir;
  LanguageModel lm(tiny_lm_config(70).transformer(), 9);
  lm.save(dir.path() / "lm.bin");
  auto back = LanguageModel::load(dir.path() / "lm.bin");
  auto a = lm.parameter_values(), b = back.parameter_values();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
  EXPECT_EQ(back.config().vocab_size, 70);
}

}  // namespace
}  // namespace versekit::generator
