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

#include <algorithm>
#include <cmath>

#include "versekit/nn.hpp"

namespace versekit::nn {

std::size_t count_parameters(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto* p : params) n += static_cast<std::size_t>(p->size());
  return n;
}

bool all_finite(const ParameterList& params) {
  return std::all_of(params.begin(), params.end(),
                     [](const Parameter* p) { return p->value.allFinite(); });
}

void zero_grads(const ParameterList& params) {
  for (auto* p : params) p->zero_grad();
}

void Sgd::step(const ParameterList& params) {
  for (auto* p : params) p->value -= lr_ * p->grad;
}

Adam::Adam(const ParameterList& params, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto* p : params) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step(const ParameterList& params, double lr) {
  if (params.size() != m_.size()) throw Error("Adam: parameter list changed");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

double noam_rate(std::int64_t step, int model_dim, int warmup, double factor) {
  double s = static_cast<double>(std::max<std::int64_t>(step, 1));
  double w = static_cast<double>(std::max(warmup, 1));
  return factor / std::sqrt(static_cast<double>(model_dim)) *
         std::min(1.0 / std::sqrt(s), s / (w * std::sqrt(w)));
}

Matrix glorot(int rows, int cols, std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Matrix normal(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

void write_config(BinaryWriter& w, const TransformerConfig& c) {
  w.i32(c.vocab_size);
  w.i32(c.layers);
  w.i32(c.heads);
  w.i32(c.hidden);
  w.i32(c.feed_forward);
  w.i32(c.max_len);
  w.f64(c.dropout);
  w.u8(c.causal ? 1 : 0);
}

TransformerConfig read_transformer_config(BinaryReader& r) {
  TransformerConfig c;
  c.vocab_size = r.i32();
  c.layers = r.i32();
  c.heads = r.i32();
  c.hidden = r.i32();
  c.feed_forward = r.i32();
  c.max_len = r.i32();
  c.dropout = r.f64();
  c.causal = r.u8() != 0;
  if (c.vocab_size <= 0 || c.layers < 0 || c.heads <= 0 || c.hidden <= 0 ||
      c.feed_forward <= 0 || c.max_len <= 0 || c.hidden % c.heads != 0) {
    throw FormatError("invalid transformer config in file");
  }
  return c;
}

namespace {

Matrix ones_row(int n) { return Matrix::Ones(1, n); }
Matrix zeros_row(int n) { return Matrix::Zero(1, n); }

}  // namespace

TransformerStack::TransformerStack(const TransformerConfig& cfg,
                                   std::mt19937_64& rng)
    : cfg_(cfg) {
  if (cfg.hidden % cfg.heads != 0) {
    throw Error("hidden size must be divisible by the head count");
  }
  const int d = cfg.hidden, f = cfg.feed_forward;
  tok_emb_ = Parameter("tok_emb", normal(cfg.vocab_size, d, 0.1, rng));
  pos_emb_ = Parameter("pos_emb", normal(cfg.max_len, d, 0.1, rng));
  layers_.resize(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    auto& L = layers_[static_cast<std::size_t>(l)];
    std::string p = "layer" + std::to_string(l) + ".";
    L.ln1_gain = Parameter(p + "ln1_gain", ones_row(d));
    L.ln1_bias = Parameter(p + "ln1_bias", zeros_row(d));
    L.wq = Parameter(p + "wq", glorot(d, d, rng));
    L.bq = Parameter(p + "bq", zeros_row(d));
    L.wk = Parameter(p + "wk", glorot(d, d, rng));
    L.bk = Parameter(p + "bk", zeros_row(d));
    L.wv = Parameter(p + "wv", glorot(d, d, rng));
    L.bv = Parameter(p + "bv", zeros_row(d));
    L.wo = Parameter(p + "wo", glorot(d, d, rng));
    L.bo = Parameter(p + "bo", zeros_row(d));
    L.ln2_gain = Parameter(p + "ln2_gain", ones_row(d));
    L.ln2_bias = Parameter(p + "ln2_bias", zeros_row(d));
    L.w1 = Parameter(p + "w1", glorot(d, f, rng));
    L.b1 = Parameter(p + "b1", zeros_row(f));
    L.w2 = Parameter(p + "w2", glorot(f, d, rng));
    L.b2 = Parameter(p + "b2", zeros_row(d));
  }
  final_gain_ = Parameter("final_gain", ones_row(d));
  final_bias_ = Parameter("final_bias", zeros_row(d));
}

Var TransformerStack::forward(Graph& g, std::span<const int> ids,
                              const Segments& segs) {
  if (static_cast<int>(ids.size()) != segs.rows()) {
    throw Error("TransformerStack: ids do not match segments");
  }
  std::vector<int> positions;
  positions.reserve(ids.size());
  for (int s = 0; s < segs.count(); ++s) {
    if (segs.length(s) > cfg_.max_len) {
      throw Error("TransformerStack: sequence longer than max_len");
    }
    for (int i = 0; i < segs.length(s); ++i) positions.push_back(i);
  }
  Var x = g.add(g.gather_rows(g.param(tok_emb_), ids),
                g.gather_rows(g.param(pos_emb_), positions));
  x = g.dropout(x, cfg_.dropout);
  for (auto& L : layers_) {
    Var h = g.layer_norm(x, g.param(L.ln1_gain), g.param(L.ln1_bias));
    Var q = g.add_row(g.matmul(h, g.param(L.wq)), g.param(L.bq));
    Var k = g.add_row(g.matmul(h, g.param(L.wk)), g.param(L.bk));
    Var v = g.add_row(g.matmul(h, g.param(L.wv)), g.param(L.bv));
    Var a = g.attention(q, k, v, segs, cfg_.heads, cfg_.causal);
    a = g.add_row(g.matmul(a, g.param(L.wo)), g.param(L.bo));
    x = g.add(x, g.dropout(a, cfg_.dropout));

    h = g.layer_norm(x, g.param(L.ln2_gain), g.param(L.ln2_bias));
    h = g.relu(g.add_row(g.matmul(h, g.param(L.w1)), g.param(L.b1)));
    h = g.dropout(h, cfg_.dropout);
    h = g.add_row(g.matmul(h, g.param(L.w2)), g.param(L.b2));
    x = g.add(x, h);
  }
  return g.layer_norm(x, g.param(final_gain_), g.param(final_bias_));
}

ParameterList TransformerStack::parameters() {
  ParameterList out{&tok_emb_, &pos_emb_};
  for (auto& L : layers_) {
    for (Parameter* p :
         {&L.ln1_gain, &L.ln1_bias, &L.wq, &L.bq, &L.wk, &L.bk, &L.wv, &L.bv,
          &L.wo, &L.bo, &L.ln2_gain, &L.ln2_bias, &L.w1, &L.b1, &L.w2, &L.b2}) {
      out.push_back(p);
    }
  }
  out.push_back(&final_gain_);
  out.push_back(&final_bias_);
  return out;
}

void write_parameters(BinaryWriter& w, const ParameterList& params) {
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->value.rows()));
    w.u32(static_cast<std::uint32_t>(p->value.cols()));
    w.f64s(p->value.data(), static_cast<std::size_t>(p->value.size()));
  }
}

void read_parameters(BinaryReader& r, const ParameterList& params) {
  if (r.u32() != params.size()) throw FormatError("parameter count mismatch");
  for (auto* p : params) {
    std::string name = r.str();
    if (name != p->name) {
      throw FormatError("expected parameter '" + p->name + "', found '" + name +
                        "'");
    }
    auto rows = r.u32(), cols = r.u32();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw FormatError("shape mismatch for parameter '" + name + "'");
    }
    r.f64s(p->value.data(), static_cast<std::size_t>(p->value.size()));
    p->zero_grad();
  }
}

}  // namespace versekit::nn
