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

#include <cmath>

#include "versekit/nn.hpp"

namespace versekit::nn {

const Matrix& Var::value() const { return graph_->nodes_[id_].val(); }
const Matrix& Var::grad() const { return graph_->grad_of(id_); }

Var Graph::push(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, nullptr, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Graph::grad_of(int id) {
  Node& n = nodes_[id];
  const Matrix& v = n.val();
  if (n.grad.rows() != v.rows() || n.grad.cols() != v.cols()) {
    n.grad = Matrix::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

void Graph::on_backward(std::function<void()> fn) {
  if (opts_.record) nodes_.back().back = std::move(fn);
}

Var Graph::constant(Matrix m) { return push(std::move(m)); }

Var Graph::param(Parameter& p) {
  nodes_.push_back(Node{{}, &p.value, {}, &p, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::matmul(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) throw Error("matmul: shape mismatch");
  Var out = push(av * bv);
  int o = out.id_, ia = a.id_, ib = b.id_;
  on_backward([this, o, ia, ib] {
    const Matrix& g = nodes_[o].grad;
    grad_of(ia).noalias() += g * nodes_[ib].val().transpose();
    grad_of(ib).noalias() += nodes_[ia].val().transpose() * g;
  });
  return out;
}

Var Graph::matmul_nt(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.cols()) throw Error("matmul_nt: shape mismatch");
  Var out = push(av * bv.transpose());
  int o = out.id_, ia = a.id_, ib = b.id_;
  on_backward([this, o, ia, ib] {
    const Matrix& g = nodes_[o].grad;
    grad_of(ia).noalias() += g * nodes_[ib].val();
    grad_of(ib).noalias() += g.transpose() * nodes_[ia].val();
  });
  return out;
}

Var Graph::add(Var a, Var b) {
  if (a.value().rows() != b.value().rows() ||
      a.value().cols() != b.value().cols()) {
    throw Error("add: shape mismatch");
  }
  Var out = push(a.value() + b.value());
  int o = out.id_, ia = a.id_, ib = b.id_;
  on_backward([this, o, ia, ib] {
    grad_of(ia) += nodes_[o].grad;
    grad_of(ib) += nodes_[o].grad;
  });
  return out;
}

Var Graph::add_row(Var a, Var row) {
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != a.value().cols()) {
    throw Error("add_row: shape mismatch");
  }
  Matrix v = a.value();
  v.rowwise() += rv.row(0);
  Var out = push(std::move(v));
  int o = out.id_, ia = a.id_, ir = row.id_;
  on_backward([this, o, ia, ir] {
    const Matrix& g = nodes_[o].grad;
    grad_of(ia) += g;
    grad_of(ir) += g.colwise().sum();
  });
  return out;
}

Var Graph::scale(Var a, double s) {
  Var out = push(a.value() * s);
  int o = out.id_, ia = a.id_;
  on_backward([this, o, ia, s] { grad_of(ia) += nodes_[o].grad * s; });
  return out;
}

Var Graph::relu(Var a) {
  Var out = push(a.value().cwiseMax(0.0));
  int o = out.id_, ia = a.id_;
  on_backward([this, o, ia] {
    const Matrix& x = nodes_[ia].val();
    grad_of(ia) += (x.array() > 0.0).cast<double>().matrix().cwiseProduct(
        nodes_[o].grad);
  });
  return out;
}

Var Graph::softsign(Var a) {
  const Matrix& x = a.value();
  Var out = push((x.array() / (1.0 + x.array().abs())).matrix());
  int o = out.id_, ia = a.id_;
  on_backward([this, o, ia] {
    const Matrix& x = nodes_[ia].val();
    auto d = 1.0 / (1.0 + x.array().abs()).square();
    grad_of(ia) += (nodes_[o].grad.array() * d).matrix();
  });
  return out;
}

Var Graph::dropout(Var a, double rate) {
  if (!opts_.training || rate <= 0.0) return a;
  if (!opts_.rng) throw Error("dropout: training graph has no rng");
  if (rate >= 1.0) throw Error("dropout rate must be < 1");
  const Matrix& x = a.value();
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  double s = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(*opts_.rng) ? s : 0.0;
  }
  Var out = push(x.cwiseProduct(mask));
  int o = out.id_, ia = a.id_;
  on_backward([this, o, ia, mask = std::move(mask)] {
    grad_of(ia) += nodes_[o].grad.cwiseProduct(mask);
  });
  return out;
}

Var Graph::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = x.value();
  const Eigen::Index n = xv.rows(), d = xv.cols();
  if (gain.value().cols() != d || bias.value().cols() != d) {
    throw Error("layer_norm: shape mismatch");
  }
  Matrix xhat(n, d);
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double mean = xv.row(r).mean();
    double var = (xv.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mean) * inv_std(r);
  }
  Matrix y = xhat;
  y.array().rowwise() *= gain.value().row(0).array();
  y.rowwise() += bias.value().row(0);
  Var out = push(std::move(y));
  int o = out.id_, ix = x.id_, ig = gain.id_, ib = bias.id_;
  on_backward([this, o, ix, ig, ib, xhat = std::move(xhat),
               inv_std = std::move(inv_std)] {
    const Matrix& g = nodes_[o].grad;
    grad_of(ig) += g.cwiseProduct(xhat).colwise().sum();
    grad_of(ib) += g.colwise().sum();
    Matrix dxhat = g;
    dxhat.array().rowwise() *= nodes_[ig].val().row(0).array();
    Matrix& gx = grad_of(ix);
    for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
      double m1 = dxhat.row(r).mean();
      double m2 = dxhat.row(r).dot(xhat.row(r)) / static_cast<double>(dxhat.cols());
      gx.row(r).array() +=
          inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
    }
  });
  return out;
}

Var Graph::gather_rows(Var table, std::span<const int> ids) {
  const Matrix& t = table.value();
  Matrix v(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= t.rows()) throw Error("gather_rows: id out of range");
    v.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
  }
  Var out = push(std::move(v));
  int o = out.id_, it = table.id_;
  on_backward([this, o, it, ids = std::vector<int>(ids.begin(), ids.end())] {
    const Matrix& g = nodes_[o].grad;
    Matrix& gt = grad_of(it);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      gt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
    }
  });
  return out;
}

Var Graph::attention(Var q, Var k, Var v, const Segments& segs, int heads,
                     bool causal) {
  const Matrix& qv = q.value();
  const Eigen::Index n = qv.rows(), d = qv.cols();
  if (k.value().rows() != n || v.value().rows() != n ||
      k.value().cols() != d || v.value().cols() != d || segs.rows() != n) {
    throw Error("attention: shape mismatch");
  }
  if (heads <= 0 || d % heads != 0) throw Error("attention: bad head count");
  const int dh = static_cast<int>(d / heads);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));

  // probs[s * heads + h] is the softmax matrix of segment s, head h.
  std::vector<Matrix> probs(static_cast<std::size_t>(segs.count() * heads));
  Matrix out = Matrix::Zero(n, d);
  for (int s = 0; s < segs.count(); ++s) {
    const int b = segs.begin(s), len = segs.length(s);
    for (int h = 0; h < heads; ++h) {
      auto qs = qv.block(b, h * dh, len, dh);
      auto ks = k.value().block(b, h * dh, len, dh);
      auto vs = v.value().block(b, h * dh, len, dh);
      Matrix sc = (qs * ks.transpose()) * inv;
      for (int r = 0; r < len; ++r) {
        int upto = causal ? r + 1 : len;
        double mx = sc.row(r).head(upto).maxCoeff();
        double total = 0.0;
        for (int c = 0; c < len; ++c) {
          double e = c < upto ? std::exp(sc(r, c) - mx) : 0.0;
          sc(r, c) = e;
          total += e;
        }
        sc.row(r) /= total;
      }
      out.block(b, h * dh, len, dh).noalias() = sc * vs;
      probs[static_cast<std::size_t>(s * heads + h)] = std::move(sc);
    }
  }
  Var res = push(std::move(out));
  int o = res.id_, iq = q.id_, ik = k.id_, iv = v.id_;
  on_backward([this, o, iq, ik, iv, segs, heads, dh, inv,
               probs = std::move(probs)] {
    const Matrix& g = nodes_[o].grad;
    Matrix& gq = grad_of(iq);
    Matrix& gk = grad_of(ik);
    Matrix& gv = grad_of(iv);
    const Matrix& qv = nodes_[iq].val();
    const Matrix& kv = nodes_[ik].val();
    const Matrix& vv = nodes_[iv].val();
    for (int s = 0; s < segs.count(); ++s) {
      const int b = segs.begin(s), len = segs.length(s);
      for (int h = 0; h < heads; ++h) {
        const Matrix& p = probs[static_cast<std::size_t>(s * heads + h)];
        auto go = g.block(b, h * dh, len, dh);
        Matrix dp = go * vv.block(b, h * dh, len, dh).transpose();
        gv.block(b, h * dh, len, dh).noalias() += p.transpose() * go;
        Eigen::VectorXd rowdot = (dp.cwiseProduct(p)).rowwise().sum();
        Matrix ds = p.cwiseProduct(dp - rowdot.replicate(1, len));
        gq.block(b, h * dh, len, dh).noalias() +=
            (ds * kv.block(b, h * dh, len, dh)) * inv;
        gk.block(b, h * dh, len, dh).noalias() +=
            (ds.transpose() * qv.block(b, h * dh, len, dh)) * inv;
      }
    }
  });
  return res;
}

Var Graph::segment_mean(Var x, const Segments& segs) {
  const Matrix& xv = x.value();
  if (segs.rows() != xv.rows()) throw Error("segment_mean: shape mismatch");
  Matrix v(segs.count(), xv.cols());
  for (int s = 0; s < segs.count(); ++s) {
    if (segs.length(s) == 0) throw Error("segment_mean: empty segment");
    v.row(s) = xv.middleRows(segs.begin(s), segs.length(s)).colwise().mean();
  }
  Var out = push(std::move(v));
  int o = out.id_, ix = x.id_;
  on_backward([this, o, ix, segs] {
    const Matrix& g = nodes_[o].grad;
    Matrix& gx = grad_of(ix);
    for (int s = 0; s < segs.count(); ++s) {
      double w = 1.0 / segs.length(s);
      for (int r = 0; r < segs.length(s); ++r) {
        gx.row(segs.begin(s) + r) += g.row(s) * w;
      }
    }
  });
  return out;
}

Var Graph::concat_cols(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows()) throw Error("concat_cols: shape mismatch");
  const Eigen::Index ac = av.cols(), bc = bv.cols();
  Matrix v(av.rows(), ac + bc);
  v << av, bv;
  Var out = push(std::move(v));
  int o = out.id_, ia = a.id_, ib = b.id_;
  on_backward([this, o, ia, ib, ac, bc] {
    const Matrix& g = nodes_[o].grad;
    grad_of(ia) += g.leftCols(ac);
    grad_of(ib) += g.rightCols(bc);
  });
  return out;
}

Var Graph::row_dot(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw Error("row_dot: shape mismatch");
  }
  Matrix v = av.cwiseProduct(bv).rowwise().sum();
  Var out = push(std::move(v));
  int o = out.id_, ia = a.id_, ib = b.id_;
  on_backward([this, o, ia, ib] {
    const Matrix& g = nodes_[o].grad;
    Matrix ga = nodes_[ib].val();
    ga.array().colwise() *= g.col(0).array();
    Matrix gb = nodes_[ia].val();
    gb.array().colwise() *= g.col(0).array();
    grad_of(ia) += ga;
    grad_of(ib) += gb;
  });
  return out;
}

Var Graph::softmax_cross_entropy(Var logits, std::span<const int> targets) {
  const Matrix& lv = logits.value();
  const Eigen::Index n = lv.rows();
  if (static_cast<std::size_t>(n) != targets.size() || n == 0) {
    throw Error("softmax_cross_entropy: target count mismatch");
  }
  Matrix probs(n, lv.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= lv.cols()) throw Error("softmax_cross_entropy: bad target");
    double mx = lv.row(r).maxCoeff();
    probs.row(r) = (lv.row(r).array() - mx).exp();
    double z = probs.row(r).sum();
    probs.row(r) /= z;
    loss += -(lv(r, t) - mx - std::log(z));
  }
  Matrix v(1, 1);
  v(0, 0) = loss / static_cast<double>(n);
  Var out = push(std::move(v));
  int o = out.id_, il = logits.id_;
  on_backward([this, o, il, probs = std::move(probs),
               targets = std::vector<int>(targets.begin(), targets.end())] {
    double g = nodes_[o].grad(0, 0) / static_cast<double>(probs.rows());
    Matrix& gl = grad_of(il);
    gl += probs * g;
    for (std::size_t r = 0; r < targets.size(); ++r) {
      gl(static_cast<Eigen::Index>(r), targets[r]) -= g;
    }
  });
  return out;
}

void Graph::backward(Var loss) {
  if (!opts_.record) throw Error("backward on a graph built without recording");
  if (loss.value().size() != 1) throw Error("backward: loss must be scalar");
  grad_of(loss.id_)(0, 0) = 1.0;
  for (int i = loss.id_; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0) continue;
    if (n.back) n.back();
    if (n.param) n.param->grad += n.grad;
  }
}

}  // namespace versekit::nn
