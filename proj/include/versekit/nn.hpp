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

// Minimal reverse-mode differentiation over dense row-major matrices, plus
// the transformer pieces built from it. Rows are token positions; several
// sequences are packed into one matrix and delimited by Segments.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "versekit/common.hpp"

namespace versekit::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)),
        grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

/// Ordered list of non-owning parameter handles; the order is the
/// serialization order.
using ParameterList = std::vector<Parameter*>;

std::size_t count_parameters(const ParameterList& params);
bool all_finite(const ParameterList& params);
void zero_grads(const ParameterList& params);

/// Sequence boundaries inside a packed matrix: sequence i spans rows
/// [offsets[i], offsets[i+1]).
struct Segments {
  std::vector<int> offsets{0};

  void add(int length) { offsets.push_back(offsets.back() + length); }
  int count() const { return static_cast<int>(offsets.size()) - 1; }
  int rows() const { return offsets.back(); }
  int begin(int i) const { return offsets[i]; }
  int length(int i) const { return offsets[i + 1] - offsets[i]; }
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  const Matrix& grad() const;
  int id() const { return id_; }

 private:
  friend class Graph;
  Var(Graph* g, int id) : graph_(g), id_(id) {}
  Graph* graph_ = nullptr;
  int id_ = -1;
};

/// Records operations for one forward pass. With `record` false no backward
/// closures are kept (inference). Dropout is active only when `training`.
class Graph {
 public:
  struct Options {
    bool record = true;
    bool training = false;
    std::mt19937_64* rng = nullptr;  // required when training with dropout
  };

  Graph() : Graph(Options{}) {}
  explicit Graph(Options opts) : opts_(opts) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool training() const { return opts_.training; }

  Var constant(Matrix m);
  /// Leaf bound to a parameter. backward() adds into `p.grad`.
  Var param(Parameter& p);

  Var matmul(Var a, Var b);
  /// a * b^T
  Var matmul_nt(Var a, Var b);
  Var add(Var a, Var b);
  /// Adds the 1xN `row` to every row of `a`.
  Var add_row(Var a, Var row);
  Var scale(Var a, double s);
  Var relu(Var a);
  Var softsign(Var a);
  Var dropout(Var a, double rate);
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  /// Rows of `table` selected by `ids`.
  Var gather_rows(Var table, std::span<const int> ids);
  /// Multi-head scaled dot-product attention applied within each segment.
  Var attention(Var q, Var k, Var v, const Segments& segs, int heads,
                bool causal);
  /// One row per segment: mean of the segment's rows.
  Var segment_mean(Var x, const Segments& segs);
  Var concat_cols(Var a, Var b);
  /// [n x 1] column of row-wise inner products.
  Var row_dot(Var a, Var b);
  /// Mean over rows of -log softmax(logits)[target]. Returns a 1x1 node.
  Var softmax_cross_entropy(Var logits, std::span<const int> targets);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every parameter leaf.
  void backward(Var loss);

 private:
  friend class Var;
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Matrix grad;
    Parameter* param = nullptr;
    std::function<void()> back;

    const Matrix& val() const { return ref ? *ref : value; }
  };

  Var push(Matrix value);
  Node& node(Var v) { return nodes_[v.id_]; }
  /// Gradient buffer of `v`, allocated as zeros on first use.
  Matrix& grad_of(int id);
  void on_backward(std::function<void()> fn);

  Options opts_;
  std::vector<Node> nodes_;
};

/// Plain stochastic gradient descent.
class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(const ParameterList& params);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_;
};

class Adam {
 public:
  Adam(const ParameterList& params, double beta1 = 0.9, double beta2 = 0.98,
       double eps = 1e-9);
  void step(const ParameterList& params, double lr);

 private:
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_, v_;
};

/// Warmup-then-inverse-sqrt schedule, scaled by model width.
double noam_rate(std::int64_t step, int model_dim, int warmup,
                 double factor = 1.0);

struct TransformerConfig {
  int vocab_size = 512;
  int layers = 2;
  int heads = 2;
  int hidden = 64;
  int feed_forward = 256;
  int max_len = 48;
  double dropout = 0.1;
  bool causal = true;
};

void write_config(BinaryWriter& w, const TransformerConfig& c);
TransformerConfig read_transformer_config(BinaryReader& r);

struct TransformerLayer {
  Parameter ln1_gain, ln1_bias;
  Parameter wq, bq, wk, bk, wv, bv, wo, bo;
  Parameter ln2_gain, ln2_bias;
  Parameter w1, b1, w2, b2;
};

/// Token + position embeddings, pre-norm self-attention blocks, final norm.
class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(const TransformerConfig& cfg, std::mt19937_64& rng);

  const TransformerConfig& config() const { return cfg_; }
  void set_dropout(double rate) { cfg_.dropout = rate; }
  /// `ids` packed by `segs`; sequences longer than max_len must be cut by
  /// the caller. Returns one hidden row per input position.
  Var forward(Graph& g, std::span<const int> ids, const Segments& segs);
  ParameterList parameters();

 private:
  TransformerConfig cfg_;
  Parameter tok_emb_, pos_emb_;
  std::vector<TransformerLayer> layers_;
  Parameter final_gain_, final_bias_;
};

/// Glorot-uniform initialised weight matrix.
Matrix glorot(int rows, int cols, std::mt19937_64& rng);
Matrix normal(int rows, int cols, double stddev, std::mt19937_64& rng);

void write_parameters(BinaryWriter& w, const ParameterList& params);
/// Shapes and names must match the destination list exactly.
void read_parameters(BinaryReader& r, const ParameterList& params);

}  // namespace versekit::nn
