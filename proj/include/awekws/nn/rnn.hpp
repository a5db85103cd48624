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

#include <string>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/nn/layers.hpp"
#include "awekws/nn/params.hpp"
#include "awekws/rng.hpp"
#include "awekws/tensor.hpp"

namespace awekws::nn {

struct RnnConfig {
  Index input_dim = 768;
  Index hidden_dim = 400;
  Index n_layers = 3;
  Index awe_dim = 256;

  void validate() const {
    require(input_dim > 0 && hidden_dim > 0 && n_layers > 0 && awe_dim > 0, ErrorCode::kInvalidArgument,
            "RNN dimensions must be positive");
  }
};

template <typename T>
struct RnnEncoderCache {
  std::vector<GruCache<T>> layers;
  Matrix<T> last;  // 1 x hidden, top layer's final state
};

// Unidirectional GRU stack; the top layer's final state is projected to the AWE.
struct RnnEncoderModule {
  RnnConfig config;
  std::vector<GruLayer> layers;
  Linear projection;

  template <typename T>
  static RnnEncoderModule create(ParameterStore<T>& store, const std::string& prefix, const RnnConfig& cfg,
                                 Rng& rng) {
    cfg.validate();
    RnnEncoderModule m;
    m.config = cfg;
    for (Index l = 0; l < cfg.n_layers; ++l) {
      m.layers.push_back(GruLayer::create(store, prefix + "gru" + std::to_string(l),
                                          l == 0 ? cfg.input_dim : cfg.hidden_dim, cfg.hidden_dim, rng));
    }
    m.projection = Linear::create(store, prefix + "projection", cfg.hidden_dim, cfg.awe_dim, rng);
    return m;
  }

  // Only the first `valid_frames` rows are consumed.
  template <typename T>
  Vector<T> forward(const ParameterStore<T>& p, const MatrixCRef<T>& frames, Index valid_frames,
                    RnnEncoderCache<T>& cache) const {
    if (frames.rows() < 1 || valid_frames < 1) fail(ErrorCode::kEmptySequence, "cannot embed an empty sequence");
    if (frames.cols() != config.input_dim) {
      fail(ErrorCode::kDimMismatch,
           "RNN expects dim " + std::to_string(config.input_dim) + ", got " + std::to_string(frames.cols()));
    }
    require(valid_frames <= frames.rows(), ErrorCode::kShapeMismatch, "valid length exceeds padded length");
    cache.layers.resize(layers.size());
    Matrix<T> h = frames.topRows(valid_frames);
    for (std::size_t l = 0; l < layers.size(); ++l) h = layers[l].forward(p, h, cache.layers[l]);
    cache.last = h.bottomRows(1);
    return projection.forward(p, cache.last).row(0).transpose();
  }

  template <typename T>
  void backward(const ParameterStore<T>& p, ParameterStore<T>& g, const RnnEncoderCache<T>& cache,
                const Vector<T>& d_awe) const {
    const Matrix<T> dlast = projection.backward(p, g, cache.last, d_awe.transpose());
    const Index steps = cache.layers.front().input.rows();
    Matrix<T> dh = Matrix<T>::Zero(steps, config.hidden_dim);
    dh.bottomRows(1) = dlast;
    for (std::size_t l = layers.size(); l-- > 0;) {
      Matrix<T> dx = layers[l].backward(p, g, cache.layers[l], dh);
      if (l > 0) dh = std::move(dx);
    }
  }
};

template <typename T>
struct RnnDecoderCache {
  std::vector<GruCache<T>> layers;
  Matrix<T> top;  // steps x hidden
};

// Correspondence decoder: a GRU stack fed the AWE at every step from a zero
// initial state, with a per-step linear readout to the feature dimension.
struct RnnDecoderModule {
  std::vector<GruLayer> layers;
  Linear readout;

  template <typename T>
  static RnnDecoderModule create(ParameterStore<T>& store, const std::string& prefix, const RnnConfig& cfg,
                                 Rng& rng) {
    cfg.validate();
    RnnDecoderModule m;
    for (Index l = 0; l < cfg.n_layers; ++l) {
      m.layers.push_back(GruLayer::create(store, prefix + "gru" + std::to_string(l),
                                          l == 0 ? cfg.awe_dim : cfg.hidden_dim, cfg.hidden_dim, rng));
    }
    m.readout = Linear::create(store, prefix + "readout", cfg.hidden_dim, cfg.input_dim, rng);
    return m;
  }

  template <typename T>
  Matrix<T> forward(const ParameterStore<T>& p, const Vector<T>& awe, Index steps, RnnDecoderCache<T>& cache) const {
    if (steps < 1) fail(ErrorCode::kInvalidLength, "decoder target length must be at least 1");
    require(awe.size() == layers.front().in_dim, ErrorCode::kDimMismatch, "decoder input has the wrong dim");
    cache.layers.resize(layers.size());
    Matrix<T> h = awe.transpose().replicate(steps, 1);
    for (std::size_t l = 0; l < layers.size(); ++l) h = layers[l].forward(p, h, cache.layers[l]);
    cache.top = std::move(h);
    return readout.forward(p, cache.top);
  }

  // Returns dL/dawe.
  template <typename T>
  Vector<T> backward(const ParameterStore<T>& p, ParameterStore<T>& g, const RnnDecoderCache<T>& cache,
                     const MatrixCRef<T>& d_output) const {
    Matrix<T> dh = readout.backward(p, g, cache.top, d_output);
    for (std::size_t l = layers.size(); l-- > 0;) dh = layers[l].backward(p, g, cache.layers[l], dh);
    return dh.colwise().sum().transpose();
  }
};

}  // namespace awekws::nn
