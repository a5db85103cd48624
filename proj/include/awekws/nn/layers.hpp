// Copyright 2026 The awekws Authors.
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

// Differentiable building blocks. Each layer only holds parameter handles and
// shapes; values live in a ParameterStore<T>. forward() fills a cache that the
// matching backward() consumes. backward() accumulates (+=) into the gradient
// store, which must share the parameter store's layout.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/nn/params.hpp"
#include "awekws/tensor.hpp"

namespace awekws::nn {

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
}

template <typename T>
T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

// Row-wise softmax over the first `valid` columns; the remaining columns are
// set to exactly zero.
template <typename T>
void masked_softmax_rows(Matrix<T>& scores, Index valid) {
  for (Index i = 0; i < scores.rows(); ++i) {
    auto row = scores.row(i);
    const T m = row.head(valid).maxCoeff();
    T sum = 0;
    for (Index j = 0; j < valid; ++j) {
      row(j) = std::exp(row(j) - m);
      sum += row(j);
    }
    row.head(valid) /= sum;
    row.tail(row.size() - valid).setZero();
  }
}

struct Linear {
  ParamId weight;  // out x in
  ParamId bias;    // 1 x out
  Index in_dim = 0;
  Index out_dim = 0;

  template <typename T>
  static Linear create(ParameterStore<T>& store, const std::string& name, Index in, Index out, Rng& rng) {
    Linear l;
    l.in_dim = in;
    l.out_dim = out;
    l.weight = store.add(name + ".weight", out, in);
    l.bias = store.add(name + ".bias", 1, out);
    init_glorot(store, l.weight, rng);
    return l;
  }

  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& x) const {
    if (x.cols() != in_dim) {
      fail(ErrorCode::kShapeMismatch,
           "linear layer expects " + std::to_string(in_dim) + " inputs, got " + std::to_string(x.cols()));
    }
    Matrix<T> y = x * p[weight].transpose();
    y.rowwise() += p[bias].row(0);
    return y;
  }

  // Parameter gradients only.
  template <typename T>
  void accumulate(ParameterStore<T>& g, const MatrixCRef<T>& x, const MatrixCRef<T>& dy) const {
    g[weight].noalias() += dy.transpose() * x;
    g[bias].row(0) += dy.colwise().sum();
  }

  // Parameter gradients plus dL/dx.
  template <typename T>
  Matrix<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const MatrixCRef<T>& x,
                     const MatrixCRef<T>& dy) const {
    accumulate(g, x, dy);
    return dy * p[weight];
  }
};

template <typename T>
struct LayerNormCache {
  Matrix<T> normalized;  // (x - mean) / std, before gain and shift
  Vector<T> inv_std;
};

// Normalizes each row over the feature dimension.
struct LayerNorm {
  ParamId gain;   // 1 x dim, initialized to ones
  ParamId shift;  // 1 x dim
  Index dim = 0;
  double epsilon = 1e-10;

  template <typename T>
  static LayerNorm create(ParameterStore<T>& store, const std::string& name, Index dim) {
    LayerNorm ln;
    ln.dim = dim;
    ln.gain = store.add(name + ".gain", 1, dim);
    ln.shift = store.add(name + ".shift", 1, dim);
    init_constant(store, ln.gain, T(1));
    return ln;
  }

  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& x, LayerNormCache<T>& cache) const {
    const Index n = x.rows();
    cache.normalized.resize(n, dim);
    cache.inv_std.resize(n);
    for (Index i = 0; i < n; ++i) {
      const T mean = x.row(i).mean();
      auto centered = cache.normalized.row(i);
      centered = x.row(i).array() - mean;
      const T var = centered.squaredNorm() / T(dim);
      const T inv = T(1) / std::sqrt(var + T(epsilon));
      centered *= inv;
      cache.inv_std(i) = inv;
    }
    Matrix<T> y = cache.normalized.array().rowwise() * p[gain].row(0).array();
    y.rowwise() += p[shift].row(0);
    return y;
  }

  template <typename T>
  Matrix<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const LayerNormCache<T>& cache,
                     const MatrixCRef<T>& dy) const {
    g[gain].row(0) += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
    g[shift].row(0) += dy.colwise().sum();
    const Matrix<T> dxhat = dy.array().rowwise() * p[gain].row(0).array();
    Matrix<T> dx(dy.rows(), dim);
    for (Index i = 0; i < dy.rows(); ++i) {
      const T mean_d = dxhat.row(i).mean();
      const T mean_dx = dxhat.row(i).dot(cache.normalized.row(i)) / T(dim);
      dx.row(i) = cache.inv_std(i) *
                  (dxhat.row(i).array() - mean_d - cache.normalized.row(i).array() * mean_dx).matrix();
    }
    return dx;
  }
};

template <typename T>
struct AttentionCache {
  Matrix<T> input;
  Matrix<T> qkv;                   // L x 3*model_dim
  std::vector<Matrix<T>> weights;  // per head, L x L, masked columns are 0
  Matrix<T> context;               // L x model_dim, heads concatenated
  Index valid = 0;
};

// Multi-head scaled dot-product self-attention. Keys at positions >= valid are
// masked out of every query's softmax.
struct MultiHeadSelfAttention {
  Linear qkv;
  Linear output;
  Index model_dim = 0;
  Index n_heads = 1;

  Index head_dim() const { return model_dim / n_heads; }

  template <typename T>
  static MultiHeadSelfAttention create(ParameterStore<T>& store, const std::string& name, Index model_dim,
                                       Index n_heads, Rng& rng) {
    require(n_heads > 0 && model_dim % n_heads == 0, ErrorCode::kInvalidArgument,
            "model_dim must be divisible by n_heads");
    MultiHeadSelfAttention a;
    a.model_dim = model_dim;
    a.n_heads = n_heads;
    // Q, K and V projections are fused; init each block with its own fan.
    a.qkv.in_dim = model_dim;
    a.qkv.out_dim = 3 * model_dim;
    a.qkv.weight = store.add(name + ".qkv.weight", 3 * model_dim, model_dim);
    a.qkv.bias = store.add(name + ".qkv.bias", 1, 3 * model_dim);
    const double bound = std::sqrt(6.0 / static_cast<double>(2 * model_dim));
    auto& w = store[a.qkv.weight];
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
    a.output = Linear::create(store, name + ".out", model_dim, model_dim, rng);
    return a;
  }

  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& x, Index valid,
                    AttentionCache<T>& cache) const {
    const Index len = x.rows();
    require(valid >= 1 && valid <= len, ErrorCode::kShapeMismatch, "attention mask length out of range");
    const Index dh = head_dim();
    const T scale = T(1) / std::sqrt(T(dh));
    cache.input = x;
    cache.valid = valid;
    cache.qkv = qkv.forward(p, x);
    cache.weights.resize(static_cast<std::size_t>(n_heads));
    cache.context.resize(len, model_dim);
    for (Index h = 0; h < n_heads; ++h) {
      auto q = cache.qkv.middleCols(h * dh, dh);
      auto k = cache.qkv.middleCols(model_dim + h * dh, dh);
      auto v = cache.qkv.middleCols(2 * model_dim + h * dh, dh);
      auto& a = cache.weights[static_cast<std::size_t>(h)];
      a.noalias() = scale * (q * k.transpose());
      masked_softmax_rows(a, valid);
      cache.context.middleCols(h * dh, dh).noalias() = a.leftCols(valid) * v.topRows(valid);
    }
    return output.forward(p, cache.context);
  }

  template <typename T>
  Matrix<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const AttentionCache<T>& cache,
                     const MatrixCRef<T>& dy) const {
    const Index len = cache.input.rows();
    const Index dh = head_dim();
    const T scale = T(1) / std::sqrt(T(dh));
    const Index valid = cache.valid;
    const Matrix<T> dcontext = output.backward(p, g, cache.context, dy);
    Matrix<T> dqkv = Matrix<T>::Zero(len, 3 * model_dim);
    Matrix<T> dscores;
    for (Index h = 0; h < n_heads; ++h) {
      auto q = cache.qkv.middleCols(h * dh, dh);
      auto k = cache.qkv.middleCols(model_dim + h * dh, dh);
      auto v = cache.qkv.middleCols(2 * model_dim + h * dh, dh);
      const auto& a = cache.weights[static_cast<std::size_t>(h)];
      auto dctx = dcontext.middleCols(h * dh, dh);
      // Masked key columns have zero weight and receive zero gradient.
      const Matrix<T> a_valid = a.leftCols(valid);
      dqkv.middleCols(2 * model_dim + h * dh, dh).topRows(valid).noalias() = a_valid.transpose() * dctx;
      dscores.noalias() = dctx * v.topRows(valid).transpose();  // dL/dA, L x valid
      for (Index i = 0; i < len; ++i) {
        const T dot = dscores.row(i).dot(a_valid.row(i));
        dscores.row(i) = (a_valid.row(i).array() * (dscores.row(i).array() - dot)).matrix();
      }
      dscores *= scale;
      dqkv.middleCols(h * dh, dh).noalias() = dscores * k.topRows(valid);
      dqkv.middleCols(model_dim + h * dh, dh).topRows(valid).noalias() = dscores.transpose() * q;
    }
    return qkv.backward(p, g, cache.input, dqkv);
  }
};

template <typename T>
struct FeedForwardCache {
  Matrix<T> input;
  Matrix<T> pre;  // pre-activation of the hidden layer
  Matrix<T> act;
};

struct FeedForward {
  Linear up;
  Linear down;

  template <typename T>
  static FeedForward create(ParameterStore<T>& store, const std::string& name, Index model_dim, Index ffn_dim,
                            Rng& rng) {
    FeedForward f;
    f.up = Linear::create(store, name + ".up", model_dim, ffn_dim, rng);
    f.down = Linear::create(store, name + ".down", ffn_dim, model_dim, rng);
    return f;
  }

  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& x, FeedForwardCache<T>& cache) const {
    cache.input = x;
    cache.pre = up.forward(p, x);
    cache.act = cache.pre.unaryExpr([](T v) { return gelu(v); });
    return down.forward(p, cache.act);
  }

  template <typename T>
  Matrix<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const FeedForwardCache<T>& cache,
                     const MatrixCRef<T>& dy) const {
    Matrix<T> dact = down.backward(p, g, cache.act, dy);
    dact.array() *= cache.pre.unaryExpr([](T v) { return gelu_grad(v); }).array();
    return up.backward(p, g, cache.input, dact);
  }
};

template <typename T>
struct GruCache {
  Matrix<T> input;   // steps x in
  Matrix<T> states;  // (steps + 1) x hidden; row 0 is the initial state
  Matrix<T> reset;   // steps x hidden
  Matrix<T> update;
  Matrix<T> candidate;
  Matrix<T> hidden_n;  // recurrent contribution to the candidate, before the reset gate
};

// Gated recurrent unit, gates ordered (reset, update, candidate):
//   r = s(Wx_r x + b_r + Wh_r h + c_r),  z = s(Wx_z x + b_z + Wh_z h + c_z)
//   n = tanh(Wx_n x + b_n + r * (Wh_n h + c_n)),  h' = (1 - z) * n + z * h
struct GruLayer {
  ParamId input_weight;   // 3H x in
  ParamId hidden_weight;  // 3H x H
  ParamId input_bias;     // 1 x 3H
  ParamId hidden_bias;    // 1 x 3H
  Index in_dim = 0;
  Index hidden_dim = 0;

  template <typename T>
  static GruLayer create(ParameterStore<T>& store, const std::string& name, Index in, Index hidden, Rng& rng) {
    GruLayer l;
    l.in_dim = in;
    l.hidden_dim = hidden;
    l.input_weight = store.add(name + ".input_weight", 3 * hidden, in);
    l.hidden_weight = store.add(name + ".hidden_weight", 3 * hidden, hidden);
    l.input_bias = store.add(name + ".input_bias", 1, 3 * hidden);
    l.hidden_bias = store.add(name + ".hidden_bias", 1, 3 * hidden);
    // Fans are per gate block (hidden x in), not the stacked 3H rows.
    for (ParamId id : {l.input_weight, l.hidden_weight}) {
      auto& w = store[id];
      const double a = std::sqrt(6.0 / static_cast<double>(hidden + w.cols()));
      for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.uniform(-a, a));
    }
    return l;
  }

  // Runs from a zero initial state; returns all hidden states (steps x H).
  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& x, GruCache<T>& cache) const {
    const Index steps = x.rows();
    const Index H = hidden_dim;
    require(x.cols() == in_dim, ErrorCode::kShapeMismatch,
            "GRU expects " + std::to_string(in_dim) + " inputs, got " + std::to_string(x.cols()));
    cache.input = x;
    Matrix<T> gx = x * p[input_weight].transpose();
    gx.rowwise() += p[input_bias].row(0);
    cache.states = Matrix<T>::Zero(steps + 1, H);
    cache.reset.resize(steps, H);
    cache.update.resize(steps, H);
    cache.candidate.resize(steps, H);
    cache.hidden_n.resize(steps, H);
    const auto& wh = p[hidden_weight];
    const auto& bh = p[hidden_bias];
    RowVector<T> gh(3 * H);
    for (Index t = 0; t < steps; ++t) {
      gh.noalias() = cache.states.row(t) * wh.transpose();
      gh += bh.row(0);
      for (Index j = 0; j < H; ++j) {
        const T r = sigmoid(gx(t, j) + gh(j));
        const T z = sigmoid(gx(t, H + j) + gh(H + j));
        const T n = std::tanh(gx(t, 2 * H + j) + r * gh(2 * H + j));
        cache.reset(t, j) = r;
        cache.update(t, j) = z;
        cache.candidate(t, j) = n;
        cache.hidden_n(t, j) = gh(2 * H + j);
        cache.states(t + 1, j) = (T(1) - z) * n + z * cache.states(t, j);
      }
    }
    return cache.states.bottomRows(steps);
  }

  // dh: dL/dh_t for every step from outside the recurrence. Returns dL/dx.
  template <typename T>
  Matrix<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const GruCache<T>& cache,
                     const MatrixCRef<T>& dh) const {
    const Index steps = cache.input.rows();
    const Index H = hidden_dim;
    const auto& wh = p[hidden_weight];
    Matrix<T> dgx(steps, 3 * H);
    Matrix<T> dgh(steps, 3 * H);
    RowVector<T> carry = RowVector<T>::Zero(H);
    RowVector<T> d(H);
    for (Index t = steps - 1; t >= 0; --t) {
      d = dh.row(t) + carry;
      for (Index j = 0; j < H; ++j) {
        const T r = cache.reset(t, j);
        const T z = cache.update(t, j);
        const T n = cache.candidate(t, j);
        const T prev = cache.states(t, j);
        const T dn_pre = d(j) * (T(1) - z) * (T(1) - n * n);
        const T dz_pre = d(j) * (prev - n) * z * (T(1) - z);
        const T dr_pre = dn_pre * cache.hidden_n(t, j) * r * (T(1) - r);
        dgx(t, j) = dr_pre;
        dgx(t, H + j) = dz_pre;
        dgx(t, 2 * H + j) = dn_pre;
        dgh(t, j) = dr_pre;
        dgh(t, H + j) = dz_pre;
        dgh(t, 2 * H + j) = dn_pre * r;
        carry(j) = d(j) * z;
      }
      carry.noalias() += dgh.row(t) * wh;
    }
    g[hidden_weight].noalias() += dgh.transpose() * cache.states.topRows(steps);
    g[hidden_bias].row(0) += dgh.colwise().sum();
    g[input_weight].noalias() += dgx.transpose() * cache.input;
    g[input_bias].row(0) += dgx.colwise().sum();
    return dgx * p[input_weight];
  }
};

}  // namespace awekws::nn
