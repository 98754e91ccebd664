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

// Two-tower next-verse scorer. Both towers run the same transformer stack;
// each has its own two-layer head (ReLU, then Softsign).

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/generator.hpp"
#include "versekit/nn.hpp"

namespace versekit::dualenc {

using Embedding = std::vector<float>;

float dot(const Embedding& a, const Embedding& b);

struct EncoderConfig {
  int vocab_size = 1000;  // tokenizer budget; the model uses the actual size
  int layers = 2;
  int heads = 2;
  int hidden = 64;
  int feed_forward = 128;
  int max_len = 32;
  /// Width of both head layers, and so the embedding dimension.
  int head_hidden = 32;

  void validate() const;
  nn::TransformerConfig transformer(int vocab, double dropout) const;
};

struct TrainConfig {
  std::int64_t pretrain_steps = 20000;
  double pretrain_lr = 0.01;
  std::int64_t finetune_steps = 10000;
  double finetune_lr = 0.001;
  int batch_size = 100;
  double dropout = 0.1;
  bool use_parent_negative = true;

  void validate() const;
};

struct TrainingStats {
  /// Mean batch loss over each window of `kWindow` steps.
  static constexpr std::int64_t kWindow = 100;
  std::vector<double> window_losses;
  std::int64_t steps = 0;
};

struct Head {
  nn::Parameter w1, b1, w2, b2;

  nn::Var apply(nn::Graph& g, nn::Var x);
};

/// Token ids of one verse as fed to the stack: a start token, then the
/// content ids cut to the context window.
using Tokens = std::vector<int>;

class DualEncoder {
 public:
  DualEncoder() = default;
  DualEncoder(generator::SubwordModel sp, const EncoderConfig& cfg,
              std::uint64_t seed);

  const EncoderConfig& config() const { return cfg_; }
  const generator::SubwordModel& tokenizer() const { return sp_; }
  int embedding_dim() const { return cfg_.head_hidden; }

  Tokens tokenize(std::string_view text) const;

  Embedding encode_parent(std::string_view text) const;
  Embedding encode_child(std::string_view text) const;
  std::vector<Embedding> encode_parents(const std::vector<std::string>& texts) const;
  std::vector<Embedding> encode_children(const std::vector<std::string>& texts) const;

  /// Mean in-batch softmax cross-entropy. Row i scores parent i against every
  /// child of the batch and, with `use_parent_negative`, against its own text
  /// run through the child tower. With `train` gradients are accumulated and
  /// dropout is active.
  double batch_loss(const std::vector<std::pair<Tokens, Tokens>>& batch,
                    bool use_parent_negative, bool train = false,
                    std::mt19937_64* rng = nullptr);
  double batch_loss(const std::vector<corpus::VersePair>& batch,
                    const TrainConfig& cfg);

  nn::ParameterList shared_parameters();
  nn::ParameterList parent_head_parameters();
  nn::ParameterList child_head_parameters();
  /// Shared stack, then parent head, then child head.
  nn::ParameterList parameters();

  void set_dropout(double rate) { stack_.set_dropout(rate); }

  void save(const std::filesystem::path& path) const;
  static DualEncoder load(const std::filesystem::path& path);

 private:
  std::vector<Embedding> encode(const std::vector<std::string>& texts,
                                bool child) const;

  EncoderConfig cfg_;
  generator::SubwordModel sp_;
  // Mutable so const inference can bind parameters into a graph.
  mutable nn::TransformerStack stack_;
  mutable Head parent_head_, child_head_;
};

/// Tokenizer over the pooled poetic and comment lines.
generator::SubwordModel train_encoder_tokenizer(const corpus::Corpus& poetic,
                                                const corpus::Corpus& comments,
                                                int vocab_size);

/// Pretrains on `comments`, then fine-tunes on `poetic`, with plain SGD.
/// A phase with zero steps is skipped and may have an empty pair list.
DualEncoder train(DualEncoder model,
                  const std::vector<corpus::VersePair>& comments,
                  const std::vector<corpus::VersePair>& poetic,
                  const TrainConfig& cfg, std::uint64_t seed,
                  TrainingStats* stats = nullptr);

}  // namespace versekit::dualenc
