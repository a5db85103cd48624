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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/nn/params.hpp"
#include "awekws/nn/rnn.hpp"
#include "awekws/nn/transformer.hpp"
#include "awekws/tensor.hpp"

namespace awekws {

inline constexpr std::string_view kMeanpoolId = "meanpool";
inline constexpr std::string_view kSubsampleId = "subsample";
inline constexpr std::string_view kCaeRnnId = "cae-rnn";
inline constexpr std::string_view kContrastiveRnnId = "contrastive-rnn";
inline constexpr std::string_view kContrastiveTransformerId = "contrastive-transformer";

struct Awe {
  Vector<float> vector;
  std::string embedder_id;
};

// Row mean of a T x D sequence.
Vector<float> meanpool(const MatrixCRef<float>& frames);

// Indices round(i (T-1) / (K-1)) for i = 0..K-1, rounding half away from zero;
// all zeros when K = 1 or T = 1.
std::vector<Index> subsample_indices(Index num_frames, Index k);

// Concatenation of the K frames picked by subsample_indices (K * D values).
Vector<float> subsample(const MatrixCRef<float>& frames, Index k);

// Maps a variable-length sequence to a fixed-size vector. Implementations are
// immutable once constructed and safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string_view id() const = 0;
  // Feature dim this embedder requires, or 0 if any dim is accepted.
  virtual Index input_dim() const = 0;
  virtual Index output_dim(Index input_dim) const = 0;
  virtual Vector<float> embed(const MatrixCRef<float>& frames) const = 0;

  Awe embed_awe(const MatrixCRef<float>& frames) const { return Awe{embed(frames), std::string(id())}; }
};

class MeanpoolEmbedder final : public Embedder {
 public:
  std::string_view id() const override { return kMeanpoolId; }
  Index input_dim() const override { return 0; }
  Index output_dim(Index input_dim) const override { return input_dim; }
  Vector<float> embed(const MatrixCRef<float>& frames) const override { return meanpool(frames); }
};

class SubsampleEmbedder final : public Embedder {
 public:
  explicit SubsampleEmbedder(Index k = 10) : k_(k) {
    require(k >= 1, ErrorCode::kInvalidArgument, "subsample K must be at least 1");
  }
  std::string_view id() const override { return kSubsampleId; }
  Index input_dim() const override { return 0; }
  Index output_dim(Index input_dim) const override { return k_ * input_dim; }
  Vector<float> embed(const MatrixCRef<float>& frames) const override { return subsample(frames, k_); }
  Index k() const { return k_; }

 private:
  Index k_;
};

// B sequences padded to a common length. Item b occupies rows
// [b * max_len, (b + 1) * max_len) of `data`; rows past lengths[b] are padding.
template <typename T>
struct PaddedBatch {
  Matrix<T> data;
  std::vector<Index> lengths;
  Index max_len = 0;

  Index size() const { return static_cast<Index>(lengths.size()); }
  auto item(Index b) const { return data.middleRows(b * max_len, max_len); }
};

template <typename T>
PaddedBatch<T> make_padded_batch(const std::vector<Matrix<T>>& sequences, T pad_value = T(0)) {
  require(!sequences.empty(), ErrorCode::kEmptySequence, "empty batch");
  PaddedBatch<T> batch;
  const Index dim = sequences.front().cols();
  for (const auto& s : sequences) {
    require(s.rows() >= 1, ErrorCode::kEmptySequence, "batch item has no frames");
    require(s.cols() == dim, ErrorCode::kDimMismatch, "batch items differ in feature dim");
    batch.max_len = std::max(batch.max_len, s.rows());
    batch.lengths.push_back(s.rows());
  }
  batch.data = Matrix<T>::Constant(batch.size() * batch.max_len, dim, pad_value);
  for (Index b = 0; b < batch.size(); ++b) {
    batch.data.middleRows(b * batch.max_len, sequences[static_cast<std::size_t>(b)].rows()) =
        sequences[static_cast<std::size_t>(b)];
  }
  return batch;
}

// The transformer AWE model. Owns its parameters.
template <typename T>
class ContrastiveTransformer {
 public:
  using Scalar = T;
  using Cache = nn::TransformerCache<T>;
  static constexpr std::string_view kId = kContrastiveTransformerId;

  ContrastiveTransformer(const nn::TransformerConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    module_ = nn::TransformerModule::create(params_, "", config, rng);
  }

  template <typename U>
  ContrastiveTransformer(const nn::TransformerConfig& config, const nn::ParameterStore<U>& values)
      : ContrastiveTransformer(config, 0) {
    require(values.size() == params_.size(), ErrorCode::kCheckpointFormat, "parameter count mismatch");
    params_.assign_from(values);
  }

  Vector<T> embed(const MatrixCRef<T>& frames) const {
    Cache cache;
    return forward(frames, frames.rows(), cache);
  }
  Vector<T> forward(const MatrixCRef<T>& frames, Index valid_frames, Cache& cache) const {
    return module_.forward(params_, frames, valid_frames, cache);
  }
  void backward(const Cache& cache, const Vector<T>& d_awe, nn::ParameterStore<T>& grads) const {
    module_.backward(params_, grads, cache, d_awe);
  }
  Matrix<T> embed_batch(const PaddedBatch<T>& batch) const {
    Matrix<T> out(batch.size(), awe_dim());
    Cache cache;
    for (Index b = 0; b < batch.size(); ++b) {
      out.row(b) = forward(batch.item(b), batch.lengths[static_cast<std::size_t>(b)], cache).transpose();
    }
    return out;
  }

  const nn::TransformerConfig& config() const { return module_.config; }
  Index input_dim() const { return module_.config.input_dim; }
  Index awe_dim() const { return module_.config.awe_dim; }
  nn::ParameterStore<T>& params() { return params_; }
  const nn::ParameterStore<T>& params() const { return params_; }

 private:
  nn::ParameterStore<T> params_;
  nn::TransformerModule module_;
};

// GRU encoder trained directly in embedding space.
template <typename T>
class ContrastiveRnn {
 public:
  using Scalar = T;
  using Cache = nn::RnnEncoderCache<T>;
  static constexpr std::string_view kId = kContrastiveRnnId;

  ContrastiveRnn(const nn::RnnConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    encoder_ = nn::RnnEncoderModule::create(params_, "encoder.", config, rng);
  }

  template <typename U>
  ContrastiveRnn(const nn::RnnConfig& config, const nn::ParameterStore<U>& values) : ContrastiveRnn(config, 0) {
    require(values.size() == params_.size(), ErrorCode::kCheckpointFormat, "parameter count mismatch");
    params_.assign_from(values);
  }

  Vector<T> embed(const MatrixCRef<T>& frames) const {
    Cache cache;
    return forward(frames, frames.rows(), cache);
  }
  Vector<T> forward(const MatrixCRef<T>& frames, Index valid_frames, Cache& cache) const {
    return encoder_.forward(params_, frames, valid_frames, cache);
  }
  void backward(const Cache& cache, const Vector<T>& d_awe, nn::ParameterStore<T>& grads) const {
    encoder_.backward(params_, grads, cache, d_awe);
  }

  const nn::RnnConfig& config() const { return encoder_.config; }
  Index input_dim() const { return encoder_.config.input_dim; }
  Index awe_dim() const { return encoder_.config.awe_dim; }
  nn::ParameterStore<T>& params() { return params_; }
  const nn::ParameterStore<T>& params() const { return params_; }

 private:
  nn::ParameterStore<T> params_;
  nn::RnnEncoderModule encoder_;
};

// Correspondence autoencoder: the encoder's AWE drives a decoder that
// reconstructs another instance of the same word.
template <typename T>
class CaeRnn {
 public:
  using Scalar = T;
  using Cache = nn::RnnEncoderCache<T>;
  using DecoderCache = nn::RnnDecoderCache<T>;
  static constexpr std::string_view kId = kCaeRnnId;

  CaeRnn(const nn::RnnConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    encoder_ = nn::RnnEncoderModule::create(params_, "encoder.", config, rng);
    decoder_ = nn::RnnDecoderModule::create(params_, "decoder.", config, rng);
  }

  template <typename U>
  CaeRnn(const nn::RnnConfig& config, const nn::ParameterStore<U>& values) : CaeRnn(config, 0) {
    require(values.size() == params_.size(), ErrorCode::kCheckpointFormat, "parameter count mismatch");
    params_.assign_from(values);
  }

  Vector<T> embed(const MatrixCRef<T>& frames) const {
    Cache cache;
    return forward(frames, frames.rows(), cache);
  }
  Vector<T> forward(const MatrixCRef<T>& frames, Index valid_frames, Cache& cache) const {
    return encoder_.forward(params_, frames, valid_frames, cache);
  }
  void backward(const Cache& cache, const Vector<T>& d_awe, nn::ParameterStore<T>& grads) const {
    encoder_.backward(params_, grads, cache, d_awe);
  }

  Matrix<T> decode(const Vector<T>& awe, Index target_len) const {
    DecoderCache cache;
    return decode(awe, target_len, cache);
  }
  Matrix<T> decode(const Vector<T>& awe, Index target_len, DecoderCache& cache) const {
    return decoder_.forward(params_, awe, target_len, cache);
  }
  Vector<T> decode_backward(const DecoderCache& cache, const MatrixCRef<T>& d_output,
                            nn::ParameterStore<T>& grads) const {
    return decoder_.backward(params_, grads, cache, d_output);
  }

  const nn::RnnConfig& config() const { return encoder_.config; }
  Index input_dim() const { return encoder_.config.input_dim; }
  Index awe_dim() const { return encoder_.config.awe_dim; }
  nn::ParameterStore<T>& params() { return params_; }
  const nn::ParameterStore<T>& params() const { return params_; }

 private:
  nn::ParameterStore<T> params_;
  nn::RnnEncoderModule encoder_;
  nn::RnnDecoderModule decoder_;
};

// Runtime-polymorphic view of a trained model. Inputs are float frames; a
// double-precision model computes in double and rounds the result.
template <typename Model>
class ModelEmbedder final : public Embedder {
 public:
  explicit ModelEmbedder(Model model) : model_(std::move(model)) {}

  std::string_view id() const override { return Model::kId; }
  Index input_dim() const override { return model_.input_dim(); }
  Index output_dim(Index) const override { return model_.awe_dim(); }
  Vector<float> embed(const MatrixCRef<float>& frames) const override {
    using S = typename Model::Scalar;
    if constexpr (std::is_same_v<S, float>) {
      return model_.embed(frames);
    } else {
      const Matrix<S> x = frames.template cast<S>();
      return model_.embed(x).template cast<float>();
    }
  }
  const Model& model() const { return model_; }

 private:
  Model model_;
};

std::unique_ptr<Embedder> make_builtin_embedder(std::string_view id, Index subsample_k = 10);

extern template class ContrastiveTransformer<float>;
extern template class ContrastiveTransformer<double>;
extern template class ContrastiveRnn<float>;
extern template class ContrastiveRnn<double>;
extern template class CaeRnn<float>;
extern template class CaeRnn<double>;

}  // namespace awekws
