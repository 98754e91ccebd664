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
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/nn.hpp"

namespace versekit::generator {

using TokenId = int;

/// Unigram subword model over raw bytes. Spaces are ordinary bytes, so
/// pieces carry their leading space and detokenization is concatenation.
/// Bytes never seen in training are spelled as an escape token followed by
/// two nibble tokens.
class SubwordModel {
 public:
  static constexpr TokenId kStart = 0;
  static constexpr TokenId kEnd = 1;
  static constexpr TokenId kEscape = 2;
  static constexpr TokenId kFirstNibble = 3;
  static constexpr int kReserved = 3 + 16;

  SubwordModel() = default;

  /// Piece text for id (empty for specials and nibbles).
  const std::string& piece(TokenId id) const { return pieces_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(pieces_.size()); }
  std::optional<TokenId> find(std::string_view piece) const;
  double score(TokenId id) const { return scores_.at(static_cast<std::size_t>(id)); }

  /// Viterbi segmentation of `text`, no specials.
  std::vector<TokenId> encode(std::string_view text) const;
  /// [start] + encode(text) + [end].
  std::vector<TokenId> tokenize(std::string_view text) const;
  /// Inverse of tokenize/encode; specials are skipped.
  std::string detokenize(const std::vector<TokenId>& ids) const;

  void save(const std::filesystem::path& path) const;
  static SubwordModel load(const std::filesystem::path& path);
  void write(BinaryWriter& w) const;
  static SubwordModel read(BinaryReader& r);

  friend SubwordModel train_tokenizer(const std::vector<std::string>& lines,
                                      int vocab_size, int max_piece_bytes);

 private:
  void rebuild_lookup();

  std::vector<std::string> pieces_;
  std::vector<double> scores_;  // log-probabilities of learned/base pieces
  std::unordered_map<std::string, TokenId> lookup_;
  std::size_t max_piece_bytes_ = 1;
};

/// Throws TrainingError when vocab_size < 64 or exceeds the number of
/// candidate pieces (base alphabet + substrings seen at least twice).
SubwordModel train_tokenizer(const std::vector<std::string>& lines,
                             int vocab_size, int max_piece_bytes = 12);
SubwordModel train_tokenizer(const corpus::Corpus& c, int vocab_size);

struct GenConfig {
  double threshold = 0.925;
  int max_iterations = 10;
  std::int64_t beam_cap = 100'000;
  int min_poets_for_start_token = 12;
  int epochs_pretrain = 400;
  int epochs_finetune = 50;
  int batch_size = 128;
  double dropout = 0.1;
  // Model shape and optimizer, not fixed by the method itself.
  int vocab_size = 512;
  int layers = 2;
  int heads = 2;
  int hidden = 64;
  int feed_forward = 256;
  int max_len = 40;
  double lr_factor = 1.0;
  int warmup_steps = 200;
  double finetune_lr = 5e-4;

  static constexpr std::int64_t kUnlimited =
      std::numeric_limits<std::int64_t>::max();

  void validate() const;
  nn::TransformerConfig transformer() const;
};

/// Anything that yields next-token distributions for a batch of prefixes.
/// Prefixes exclude the implicit start token.
class NextTokenModel {
 public:
  virtual ~NextTokenModel() = default;
  virtual int vocab_size() const = 0;
  virtual TokenId end_token() const = 0;
  virtual std::vector<std::vector<double>> next_distributions(
      const std::vector<std::vector<TokenId>>& prefixes) const = 0;
};

struct TrainingStats {
  std::vector<double> epoch_losses;
  std::int64_t steps = 0;
};

/// Decoder-only transformer LM with a softmax output over the tokenizer
/// vocabulary.
class LanguageModel : public NextTokenModel {
 public:
  LanguageModel() = default;
  LanguageModel(const nn::TransformerConfig& cfg, std::uint64_t seed);

  int vocab_size() const override { return cfg_.vocab_size; }
  TokenId end_token() const override { return SubwordModel::kEnd; }
  std::vector<std::vector<double>> next_distributions(
      const std::vector<std::vector<TokenId>>& prefixes) const override;

  const nn::TransformerConfig& config() const { return cfg_; }
  nn::ParameterList parameters();
  std::vector<const nn::Matrix*> parameter_values() const;

  /// Mean next-token cross-entropy of full lines ([start] x [end]).
  /// With `train` the graph is differentiated and dropout is active.
  double sequence_loss(const std::vector<std::vector<TokenId>>& lines,
                       bool train, std::mt19937_64* rng = nullptr);

  void save(const std::filesystem::path& path) const;
  static LanguageModel load(const std::filesystem::path& path);

 private:
  nn::TransformerConfig cfg_;
  // Mutable so const inference can bind parameters into a graph.
  mutable nn::TransformerStack stack_;
  mutable nn::Parameter out_w_, out_b_;
};

/// Content ids of each line (no specials). Lines longer than the model's
/// context are truncated at training time, without an end target.
std::vector<std::vector<TokenId>> encode_lines(
    const SubwordModel& sp, const std::vector<std::string>& lines);

/// Pretraining over the pooled corpus. Adam with a warmup schedule.
LanguageModel pretrain(const std::vector<std::vector<TokenId>>& lines,
                       const GenConfig& cfg, std::uint64_t seed,
                       TrainingStats* stats = nullptr);
/// Returns a tuned copy; `base` is never modified.
LanguageModel finetune(const LanguageModel& base,
                       const std::vector<std::vector<TokenId>>& lines,
                       const GenConfig& cfg, std::uint64_t seed,
                       TrainingStats* stats = nullptr);

/// Verse-initial tokens of `poet_id` plus tokens verse-initial for at least
/// cfg.min_poets_for_start_token poets.
std::set<TokenId> starting_tokens(
    std::string_view poet_id,
    const std::map<std::string, corpus::Corpus>& corpora,
    const SubwordModel& sp, const GenConfig& cfg);

/// Expanded verses as token sequences (without the end token).
std::set<std::vector<TokenId>> expand_tokens(const NextTokenModel& lm,
                                             const std::set<TokenId>& starts,
                                             const GenConfig& cfg);

/// Threshold expansion, detokenized; whitespace-only verses are dropped.
std::set<std::string> expand(const NextTokenModel& lm, const SubwordModel& sp,
                             const std::set<TokenId>& starts,
                             const GenConfig& cfg);

}  // namespace versekit::generator
