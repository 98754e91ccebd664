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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "versekit/generator.hpp"

namespace versekit::generator {

namespace {

constexpr char kMagic[] = "VKLMPAR1";
constexpr std::size_t kInferenceBatch = 256;

}  // namespace

void GenConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error("threshold must be in (0, 1]");
  }
  if (max_iterations < 1) throw Error("max_iterations must be >= 1");
  if (beam_cap < 1) throw Error("beam_cap must be >= 1");
  if (min_poets_for_start_token < 1) {
    throw Error("min_poets_for_start_token must be >= 1");
  }
  if (epochs_pretrain < 0 || epochs_finetune < 0) {
    throw Error("epoch counts must be >= 0");
  }
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must be in [0, 1)");
  if (hidden % heads != 0) throw Error("hidden must be divisible by heads");
  if (max_len < 2) throw Error("max_len must be >= 2");
}

nn::TransformerConfig GenConfig::transformer() const {
  return nn::TransformerConfig{vocab_size, layers,  heads, hidden,
                               feed_forward, max_len, dropout, true};
}

LanguageModel::LanguageModel(const nn::TransformerConfig& cfg,
                             std::uint64_t seed)
    : cfg_(cfg) {
  std::mt19937_64 rng(seed);
  stack_ = nn::TransformerStack(cfg, rng);
  // Small output weights keep the initial distribution close to uniform.
  out_w_ = nn::Parameter("out_w", nn::normal(cfg.hidden, cfg.vocab_size,
                                             0.01, rng));
  out_b_ = nn::Parameter("out_b", nn::Matrix::Zero(1, cfg.vocab_size));
}

nn::ParameterList LanguageModel::parameters() {
  auto p = stack_.parameters();
  p.push_back(&out_w_);
  p.push_back(&out_b_);
  return p;
}

std::vector<const nn::Matrix*> LanguageModel::parameter_values() const {
  std::vector<const nn::Matrix*> out;
  for (auto* p : const_cast<LanguageModel*>(this)->parameters()) {
    out.push_back(&p->value);
  }
  return out;
}

std::vector<std::vector<double>> LanguageModel::next_distributions(
    const std::vector<std::vector<TokenId>>& prefixes) const {
  std::vector<std::vector<double>> out;
  out.reserve(prefixes.size());
  for (std::size_t b = 0; b < prefixes.size(); b += kInferenceBatch) {
    std::size_t e = std::min(prefixes.size(), b + kInferenceBatch);
    std::vector<int> ids;
    nn::Segments segs;
    std::vector<int> last_rows;
    for (std::size_t i = b; i < e; ++i) {
      const auto& p = prefixes[i];
      // Keep the most recent context when a prefix outgrows the window.
      std::size_t room = static_cast<std::size_t>(cfg_.max_len) - 1;
      std::size_t from = p.size() > room ? p.size() - room : 0;
      if (from == 0) ids.push_back(SubwordModel::kStart);
      ids.insert(ids.end(), p.begin() + static_cast<std::ptrdiff_t>(from),
                 p.end());
      int len = static_cast<int>(p.size() - from) + (from == 0 ? 1 : 0);
      segs.add(len);
      last_rows.push_back(segs.rows() - 1);
    }
    nn::Graph g(nn::Graph::Options{.record = false});
    nn::Var h = stack_.forward(g, ids, segs);
    nn::Matrix last(static_cast<Eigen::Index>(last_rows.size()), cfg_.hidden);
    for (std::size_t i = 0; i < last_rows.size(); ++i) {
      last.row(static_cast<Eigen::Index>(i)) = h.value().row(last_rows[i]);
    }
    nn::Matrix logits = last * out_w_.value;
    logits.rowwise() += out_b_.value.row(0);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      double mx = logits.row(r).maxCoeff();
      Eigen::RowVectorXd p = (logits.row(r).array() - mx).exp();
      p /= p.sum();
      out.emplace_back(p.data(), p.data() + p.size());
    }
  }
  return out;
}

double LanguageModel::sequence_loss(
    const std::vector<std::vector<TokenId>>& lines, bool train,
    std::mt19937_64* rng) {
  std::vector<int> ids, targets;
  nn::Segments segs;
  for (const auto& line : lines) {
    std::size_t len = std::min(line.size() + 1,
                               static_cast<std::size_t>(cfg_.max_len));
    ids.push_back(SubwordModel::kStart);
    ids.insert(ids.end(), line.begin(),
               line.begin() + static_cast<std::ptrdiff_t>(len - 1));
    for (std::size_t i = 0; i < len; ++i) {
      targets.push_back(i < line.size() ? line[i] : SubwordModel::kEnd);
    }
    segs.add(static_cast<int>(len));
  }
  nn::Graph g(nn::Graph::Options{.record = train, .training = train, .rng = rng});
  nn::Var h = stack_.forward(g, ids, segs);
  nn::Var logits = g.add_row(g.matmul(h, g.param(out_w_)), g.param(out_b_));
  nn::Var loss = g.softmax_cross_entropy(logits, targets);
  if (train) g.backward(loss);
  return loss.value()(0, 0);
}

void LanguageModel::save(const std::filesystem::path& path) const {
  auto out = open_for_write(path);
  BinaryWriter w(out);
  w.magic(kMagic);
  w.u32(1);
  nn::write_config(w, cfg_);
  nn::write_parameters(w, const_cast<LanguageModel*>(this)->parameters());
}

LanguageModel LanguageModel::load(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  BinaryReader r(in, path.string());
  r.expect_magic(kMagic);
  if (r.u32() != 1) throw FormatError("unsupported language model version");
  auto cfg = nn::read_transformer_config(r);
  LanguageModel lm(cfg, 0);
  nn::read_parameters(r, lm.parameters());
  return lm;
}

std::vector<std::vector<TokenId>> encode_lines(
    const SubwordModel& sp, const std::vector<std::string>& lines) {
  std::vector<std::vector<TokenId>> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(sp.encode(l));
  return out;
}

namespace {

// Shared epoch loop. `lr_at(step)` gives the rate for 1-based step numbers.
template <typename LrFn>
void run_epochs(LanguageModel& lm, const std::vector<std::vector<TokenId>>& lines,
                int epochs, int batch_size, std::uint64_t seed, LrFn lr_at,
                TrainingStats* stats, const char* phase) {
  if (epochs == 0) return;
  if (lines.empty()) throw TrainingError(0, std::string(phase) + ": no lines");
  std::mt19937_64 rng(seed);
  auto params = lm.parameters();
  nn::Adam adam(params);
  std::vector<std::size_t> order(lines.size());
  std::iota(order.begin(), order.end(), 0);
  std::int64_t step = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(batch_size)) {
      std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(batch_size));
      std::vector<std::vector<TokenId>> batch;
      for (std::size_t i = b; i < e; ++i) batch.push_back(lines[order[i]]);
      ++step;
      nn::zero_grads(params);
      double loss = lm.sequence_loss(batch, true, &rng);
      if (!std::isfinite(loss)) {
        throw TrainingError(step, std::string(phase) + ": loss is not finite");
      }
      adam.step(params, lr_at(step));
      total += loss;
      ++batches;
    }
    if (!nn::all_finite(params)) {
      throw TrainingError(step, std::string(phase) + ": parameters diverged");
    }
    double mean = total / static_cast<double>(batches);
    spdlog::debug("{} epoch {} loss {:.4f}", phase, epoch + 1, mean);
    if (stats) stats->epoch_losses.push_back(mean);
  }
  if (stats) stats->steps += step;
}

}  // namespace

LanguageModel pretrain(const std::vector<std::vector<TokenId>>& lines,
                       const GenConfig& cfg, std::uint64_t seed,
                       TrainingStats* stats) {
  cfg.validate();
  LanguageModel lm(cfg.transformer(), seed);
  run_epochs(
      lm, lines, cfg.epochs_pretrain, cfg.batch_size, seed ^ 0x5eed,
      [&](std::int64_t step) {
        return nn::noam_rate(step, cfg.hidden, cfg.warmup_steps, cfg.lr_factor);
      },
      stats, "pretrain");
  return lm;
}

LanguageModel finetune(const LanguageModel& base,
                       const std::vector<std::vector<TokenId>>& lines,
                       const GenConfig& cfg, std::uint64_t seed,
                       TrainingStats* stats) {
  cfg.validate();
  LanguageModel lm = base;
  run_epochs(
      lm, lines, cfg.epochs_finetune, cfg.batch_size, seed,
      [&](std::int64_t) { return cfg.finetune_lr; }, stats, "finetune");
  return lm;
}

}  // namespace versekit::generator
