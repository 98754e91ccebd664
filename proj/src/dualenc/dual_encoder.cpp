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

#include "versekit/dualenc.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace versekit::dualenc {

namespace {

constexpr char kMagic[] = "VKDUALE1";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kInferenceBatch = 256;

Head make_head(const std::string& prefix, int in, int width,
               std::mt19937_64& rng) {
  Head h;
  h.w1 = nn::Parameter(prefix + ".w1", nn::glorot(in, width, rng));
  h.b1 = nn::Parameter(prefix + ".b1", nn::Matrix::Zero(1, width));
  h.w2 = nn::Parameter(prefix + ".w2", nn::glorot(width, width, rng));
  h.b2 = nn::Parameter(prefix + ".b2", nn::Matrix::Zero(1, width));
  return h;
}

nn::ParameterList head_params(Head& h) { return {&h.w1, &h.b1, &h.w2, &h.b2}; }

void pack(const std::vector<const Tokens*>& seqs, std::vector<int>& ids,
          nn::Segments& segs) {
  for (const Tokens* t : seqs) {
    ids.insert(ids.end(), t->begin(), t->end());
    segs.add(static_cast<int>(t->size()));
  }
}

}  // namespace

float dot(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw Error("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return static_cast<float>(s);
}

void EncoderConfig::validate() const {
  if (layers < 1 || heads < 1 || hidden < 1 || feed_forward < 1 ||
      head_hidden < 1) {
    throw Error("encoder config: dimensions must be positive");
  }
  if (hidden % heads != 0) throw Error("encoder config: hidden % heads != 0");
  if (max_len < 2) throw Error("encoder config: max_len must be >= 2");
}

nn::TransformerConfig EncoderConfig::transformer(int vocab,
                                                 double dropout) const {
  return nn::TransformerConfig{vocab,        layers,  heads,   hidden,
                               feed_forward, max_len, dropout, false};
}

void TrainConfig::validate() const {
  if (pretrain_steps < 0 || finetune_steps < 0) {
    throw Error("train config: steps must be >= 0");
  }
  if (!(pretrain_lr > 0.0) || !(finetune_lr > 0.0)) {
    throw Error("train config: learning rates must be positive");
  }
  if (batch_size < 2) throw Error("train config: batch_size must be >= 2");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw Error("train config: dropout must be in [0, 1)");
  }
}

nn::Var Head::apply(nn::Graph& g, nn::Var x) {
  x = g.relu(g.add_row(g.matmul(x, g.param(w1)), g.param(b1)));
  return g.softsign(g.add_row(g.matmul(x, g.param(w2)), g.param(b2)));
}

DualEncoder::DualEncoder(generator::SubwordModel sp, const EncoderConfig& cfg,
                         std::uint64_t seed)
    : cfg_(cfg), sp_(std::move(sp)) {
  cfg_.validate();
  cfg_.vocab_size = sp_.size();
  std::mt19937_64 rng(seed);
  stack_ = nn::TransformerStack(cfg_.transformer(sp_.size(), 0.0), rng);
  parent_head_ = make_head("parent", cfg_.hidden, cfg_.head_hidden, rng);
  child_head_ = make_head("child", cfg_.hidden, cfg_.head_hidden, rng);
}

Tokens DualEncoder::tokenize(std::string_view text) const {
  Tokens out{generator::SubwordModel::kStart};
  for (auto id : sp_.encode(text)) {
    if (static_cast<int>(out.size()) >= cfg_.max_len) break;
    out.push_back(static_cast<int>(id));
  }
  return out;
}

std::vector<Embedding> DualEncoder::encode(const std::vector<std::string>& texts,
                                           bool child) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t b = 0; b < texts.size(); b += kInferenceBatch) {
    std::size_t e = std::min(texts.size(), b + kInferenceBatch);
    std::vector<Tokens> toks;
    for (std::size_t i = b; i < e; ++i) toks.push_back(tokenize(texts[i]));
    std::vector<const Tokens*> ptrs;
    for (const auto& t : toks) ptrs.push_back(&t);
    std::vector<int> ids;
    nn::Segments segs;
    pack(ptrs, ids, segs);
    nn::Graph g(nn::Graph::Options{.record = false});
    nn::Var pooled = g.segment_mean(stack_.forward(g, ids, segs), segs);
    nn::Var emb = (child ? child_head_ : parent_head_).apply(g, pooled);
    const nn::Matrix& m = emb.value();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Embedding v(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        v[static_cast<std::size_t>(c)] = static_cast<float>(m(r, c));
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

Embedding DualEncoder::encode_parent(std::string_view text) const {
  return encode({std::string(text)}, false).front();
}

Embedding DualEncoder::encode_child(std::string_view text) const {
  return encode({std::string(text)}, true).front();
}

std::vector<Embedding> DualEncoder::encode_parents(
    const std::vector<std::string>& texts) const {
  return encode(texts, false);
}

std::vector<Embedding> DualEncoder::encode_children(
    const std::vector<std::string>& texts) const {
  return encode(texts, true);
}

double DualEncoder::batch_loss(
    const std::vector<std::pair<Tokens, Tokens>>& batch,
    bool use_parent_negative, bool train, std::mt19937_64* rng) {
  if (batch.size() < 2) throw Error("batch_loss: need at least 2 pairs");
  std::vector<const Tokens*> parents, children;
  for (const auto& [p, c] : batch) {
    parents.push_back(&p);
    children.push_back(&c);
  }
  std::vector<int> pid, cid;
  nn::Segments psegs, csegs;
  pack(parents, pid, psegs);
  pack(children, cid, csegs);

  nn::Graph g(nn::Graph::Options{.record = train, .training = train, .rng = rng});
  nn::Var hp = g.segment_mean(stack_.forward(g, pid, psegs), psegs);
  nn::Var hc = g.segment_mean(stack_.forward(g, cid, csegs), csegs);
  nn::Var ep = parent_head_.apply(g, hp);
  nn::Var ec = child_head_.apply(g, hc);
  nn::Var logits = g.matmul_nt(ep, ec);
  if (use_parent_negative) {
    nn::Var self = child_head_.apply(g, hp);
    logits = g.concat_cols(logits, g.row_dot(ep, self));
  }
  std::vector<int> targets(batch.size());
  std::iota(targets.begin(), targets.end(), 0);
  nn::Var loss = g.softmax_cross_entropy(logits, targets);
  if (train) g.backward(loss);
  return loss.value()(0, 0);
}

double DualEncoder::batch_loss(const std::vector<corpus::VersePair>& batch,
                               const TrainConfig& cfg) {
  std::vector<std::pair<Tokens, Tokens>> toks;
  for (const auto& p : batch) {
    toks.emplace_back(tokenize(p.parent), tokenize(p.child));
  }
  return batch_loss(toks, cfg.use_parent_negative);
}

nn::ParameterList DualEncoder::shared_parameters() { return stack_.parameters(); }
nn::ParameterList DualEncoder::parent_head_parameters() {
  return head_params(parent_head_);
}
nn::ParameterList DualEncoder::child_head_parameters() {
  return head_params(child_head_);
}

nn::ParameterList DualEncoder::parameters() {
  auto out = shared_parameters();
  for (auto* p : parent_head_parameters()) out.push_back(p);
  for (auto* p : child_head_parameters()) out.push_back(p);
  return out;
}

void DualEncoder::save(const std::filesystem::path& path) const {
  auto out = open_for_write(path);
  BinaryWriter w(out);
  w.magic(kMagic);
  w.u32(kVersion);
  nn::write_config(w, stack_.config());
  w.i32(cfg_.head_hidden);
  sp_.write(w);
  nn::write_parameters(w, const_cast<DualEncoder*>(this)->parameters());
}

DualEncoder DualEncoder::load(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  BinaryReader r(in, path.string());
  r.expect_magic(kMagic);
  if (r.u32() != kVersion) throw FormatError("unsupported encoder version");
  auto t = nn::read_transformer_config(r);
  EncoderConfig cfg;
  cfg.vocab_size = t.vocab_size;
  cfg.layers = t.layers;
  cfg.heads = t.heads;
  cfg.hidden = t.hidden;
  cfg.feed_forward = t.feed_forward;
  cfg.max_len = t.max_len;
  cfg.head_hidden = r.i32();
  auto sp = generator::SubwordModel::read(r);
  if (sp.size() != t.vocab_size) {
    throw FormatError("encoder vocabulary does not match its tokenizer");
  }
  DualEncoder enc(std::move(sp), cfg, 0);
  nn::read_parameters(r, enc.parameters());
  return enc;
}

generator::SubwordModel train_encoder_tokenizer(const corpus::Corpus& poetic,
                                                const corpus::Corpus& comments,
                                                int vocab_size) {
  auto lines = poetic.lines();
  auto more = comments.lines();
  lines.insert(lines.end(), more.begin(), more.end());
  return generator::train_tokenizer(lines, vocab_size);
}

namespace {

void run_phase(DualEncoder& model, const std::vector<corpus::VersePair>& pairs,
               std::int64_t steps, double lr, const TrainConfig& cfg,
               std::mt19937_64& rng, std::int64_t& step, TrainingStats* stats,
               const char* phase) {
  if (steps == 0) return;
  if (pairs.size() < 2) {
    throw TrainingError(step, std::string(phase) + ": need at least 2 pairs");
  }
  std::vector<std::pair<Tokens, Tokens>> toks;
  toks.reserve(pairs.size());
  for (const auto& p : pairs) {
    toks.emplace_back(model.tokenize(p.parent), model.tokenize(p.child));
  }
  auto params = model.parameters();
  nn::Sgd sgd(lr);
  std::vector<std::size_t> order(toks.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::size_t batch_size =
      std::min(order.size(), static_cast<std::size_t>(cfg.batch_size));
  double window = 0.0;
  std::int64_t in_window = 0;

  std::vector<std::pair<Tokens, Tokens>> batch;
  for (std::int64_t s = 0; s < steps; ++s) {
    batch.clear();
    while (batch.size() < batch_size) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(toks[order[cursor++]]);
    }
    ++step;
    nn::zero_grads(params);
    double loss = model.batch_loss(batch, cfg.use_parent_negative, true, &rng);
    if (!std::isfinite(loss)) {
      throw TrainingError(step, std::string(phase) + ": loss is not finite");
    }
    sgd.step(params);
    window += loss;
    if (++in_window == TrainingStats::kWindow || s + 1 == steps) {
      spdlog::debug("{} step {} loss {:.4f}", phase, step,
                    window / static_cast<double>(in_window));
      if (stats) {
        stats->window_losses.push_back(window / static_cast<double>(in_window));
      }
      window = 0.0;
      in_window = 0;
    }
  }
  if (!nn::all_finite(params)) {
    throw TrainingError(step, std::string(phase) + ": parameters diverged");
  }
}

}  // namespace

DualEncoder train(DualEncoder model,
                  const std::vector<corpus::VersePair>& comments,
                  const std::vector<corpus::VersePair>& poetic,
                  const TrainConfig& cfg, std::uint64_t seed,
                  TrainingStats* stats) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::int64_t step = 0;
  model.set_dropout(cfg.dropout);
  run_phase(model, comments, cfg.pretrain_steps, cfg.pretrain_lr, cfg, rng,
            step, stats, "pretrain");
  run_phase(model, poetic, cfg.finetune_steps, cfg.finetune_lr, cfg, rng, step,
            stats, "finetune");
  model.set_dropout(0.0);
  if (stats) stats->steps += step;
  return model;
}

}  // namespace versekit::dualenc
