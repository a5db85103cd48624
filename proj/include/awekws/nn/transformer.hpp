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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/nn/layers.hpp"
#include "awekws/nn/params.hpp"
#include "awekws/rng.hpp"
#include "awekws/tensor.hpp"

namespace awekws::nn {

struct TransformerConfig {
  Index input_dim = 768;
  Index model_dim = 256;
  Index n_heads = 16;
  Index n_layers = 3;
  Index ffn_dim = 1024;
  Index awe_dim = 256;

  void validate() const {
    require(input_dim > 0 && model_dim > 0 && n_heads > 0 && n_layers > 0 && ffn_dim > 0 && awe_dim > 0,
            ErrorCode::kInvalidArgument, "transformer dimensions must be positive");
    require(model_dim % n_heads == 0, ErrorCode::kInvalidArgument,
            "model_dim " + std::to_string(model_dim) + " is not divisible by n_heads " + std::to_string(n_heads));
  }
};

// Sinusoidal position code for `rows` positions starting at 0.
template <typename T>
Matrix<T> sinusoidal_positions(Index rows, Index dim) {
  Matrix<T> pe(rows, dim);
  for (Index pos = 0; pos < rows; ++pos) {
    for (Index i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(dim));
      const double angle = static_cast<double>(pos) * freq;
      pe(pos, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

template <typename T>
struct TransformerBlockCache {
  LayerNormCache<T> norm1;
  AttentionCache<T> attention;
  LayerNormCache<T> norm2;
  FeedForwardCache<T> ffn;
};

template <typename T>
struct TransformerCache {
  Matrix<T> frames;
  Index valid_frames = 0;
  std::vector<TransformerBlockCache<T>> blocks;
  LayerNormCache<T> final_norm;
  Matrix<T> summary;  // 1 x model_dim: normalized final-layer output at the prepended position
};

// Encoder that prepends a trainable token (initialized to ones) to the projected
// frames and returns a linear map of the token's final-layer output.
// Pre-norm residual blocks: x += attn(ln1(x)); x += ffn(ln2(x)); a final layer
// norm is applied to the summary position before the output projection.
struct TransformerModule {
  TransformerConfig config;
  Linear input_proj;
  ParamId token;
  struct Block {
    LayerNorm norm1;
    MultiHeadSelfAttention attention;
    LayerNorm norm2;
    FeedForward ffn;
  };
  std::vector<Block> blocks;
  LayerNorm final_norm;
  Linear output;

  template <typename T>
  static TransformerModule create(ParameterStore<T>& store, const std::string& prefix,
                                  const TransformerConfig& cfg, Rng& rng) {
    cfg.validate();
    TransformerModule m;
    m.config = cfg;
    m.input_proj = Linear::create(store, prefix + "input_proj", cfg.input_dim, cfg.model_dim, rng);
    m.token = store.add(prefix + "token", 1, cfg.model_dim);
    init_constant(store, m.token, T(1));
    for (Index l = 0; l < cfg.n_layers; ++l) {
      const std::string name = prefix + "block" + std::to_string(l);
      Block b;
      b.norm1 = LayerNorm::create(store, name + ".norm1", cfg.model_dim);
      b.attention = MultiHeadSelfAttention::create(store, name + ".attention", cfg.model_dim, cfg.n_heads, rng);
      b.norm2 = LayerNorm::create(store, name + ".norm2", cfg.model_dim);
      b.ffn = FeedForward::create(store, name + ".ffn", cfg.model_dim, cfg.ffn_dim, rng);
      m.blocks.push_back(b);
    }
    m.final_norm = LayerNorm::create(store, prefix + "final_norm", cfg.model_dim);
    m.output = Linear::create(store, prefix + "output", cfg.model_dim, cfg.awe_dim, rng);
    return m;
  }

  // Rows of `frames` at or beyond `valid_frames` are padding and are masked
  // out of attention; they cannot influence the result.
  template <typename T>
  Vector<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& frames, Index valid_frames,
                    TransformerCache<T>& cache) const {
    if (frames.rows() < 1 || valid_frames < 1) fail(ErrorCode::kEmptySequence, "cannot embed an empty sequence");
    if (frames.cols() != config.input_dim) {
      fail(ErrorCode::kDimMismatch, "transformer expects dim " + std::to_string(config.input_dim) + ", got " +
                                        std::to_string(frames.cols()));
    }
    require(valid_frames <= frames.rows(), ErrorCode::kShapeMismatch, "valid length exceeds padded length");
    const Index len = frames.rows() + 1;
    cache.frames = frames;
    cache.valid_frames = valid_frames;

    Matrix<T> h(len, config.model_dim);
    h.row(0) = p[token].row(0);
    h.bottomRows(len - 1) = input_proj.forward(p, frames);
    h += sinusoidal_positions<T>(len, config.model_dim);

    cache.blocks.resize(blocks.size());
    for (std::size_t l = 0; l < blocks.size(); ++l) {
      const auto& b = blocks[l];
      auto& c = cache.blocks[l];
      h += b.attention.forward(p, b.norm1.forward(p, h, c.norm1), valid_frames + 1, c.attention);
      h += b.ffn.forward(p, b.norm2.forward(p, h, c.norm2), c.ffn);
    }
    cache.summary = final_norm.forward(p, h.topRows(1), cache.final_norm);
    return output.forward(p, cache.summary).row(0).transpose();
  }

  template <typename T>
  void backward(const ParameterStore<T>& p, ParameterStore<T>& g, const TransformerCache<T>& cache,
                const Vector<T>& d_awe) const {
    const Index len = cache.frames.rows() + 1;
    const Matrix<T> dsummary = output.backward(p, g, cache.summary, d_awe.transpose());
    Matrix<T> dh = Matrix<T>::Zero(len, config.model_dim);
    dh.topRows(1) = final_norm.backward(p, g, cache.final_norm, dsummary);
    for (std::size_t l = blocks.size(); l-- > 0;) {
      const auto& b = blocks[l];
      const auto& c = cache.blocks[l];
      dh += b.norm2.backward(p, g, c.norm2, b.ffn.backward(p, g, c.ffn, dh));
      dh += b.norm1.backward(p, g, c.norm1, b.attention.backward(p, g, c.attention, dh));
    }
    g[token].row(0) += dh.row(0);
    input_proj.accumulate(g, cache.frames, dh.bottomRows(len - 1));
  }
};

}  // namespace awekws::nn
