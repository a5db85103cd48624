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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "awekws/corpus.hpp"
#include "awekws/embedders.hpp"
#include "awekws/error.hpp"
#include "awekws/losses.hpp"
#include "awekws/nn/adam.hpp"
#include "awekws/rng.hpp"

namespace awekws {

struct TrainConfig {
  std::size_t steps = 5000;
  std::size_t batch_size = 8;  // N pairs per step
  double temperature = 0.1;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TrainLogEntry {
  std::size_t step = 0;  // 1-based
  double loss = 0.0;     // NT-Xent: sum over the batch; reconstruction: batch mean
  double wall_seconds = 0.0;
};

using TrainObserver = std::function<void(const TrainLogEntry&)>;

// Draws `n` pair indices whose anchors carry n different labels. Pairs are
// drawn uniformly and redrawn while their label is already in the batch.
std::vector<std::size_t> draw_distinct_label_batch(const std::vector<WordSegment>& segments,
                                                   const std::vector<SegmentPair>& pairs, std::size_t n, Rng& rng);

namespace detail {

template <typename T>
std::vector<Matrix<T>> cast_segments(const std::vector<WordSegment>& segments, Index input_dim) {
  std::vector<Matrix<T>> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    if (s.frames.rows() < 1) fail(ErrorCode::kEmptySequence, "segment of '" + s.label + "' has no frames");
    if (s.frames.cols() != input_dim) {
      fail(ErrorCode::kDimMismatch, "segment dim " + std::to_string(s.frames.cols()) + " but model expects " +
                                        std::to_string(input_dim));
    }
    out.push_back(s.frames.cast<T>());
  }
  return out;
}

inline void check_pairs(const std::vector<WordSegment>& segments, const std::vector<SegmentPair>& pairs) {
  if (pairs.empty()) fail(ErrorCode::kNoPositivePairsAvailable, "training needs at least one pair");
  for (const auto& p : pairs) {
    require(p.anchor < segments.size() && p.positive < segments.size(), ErrorCode::kInvalidArgument,
            "pair refers to a missing segment");
  }
}

template <typename T>
void reduce_mean(nn::ParameterStore<T>& total, const std::vector<nn::ParameterStore<T>>& parts, T scale) {
  total.set_zero();
  for (const auto& p : parts) total.add_scaled(p, scale);
}

}  // namespace detail

// Contrastive training with the NT-Xent loss on batches of N distinct-label
// pairs. The optimizer sees the batch loss divided by N. Per-item gradients are
// reduced in a fixed order, so results do not depend on cfg.threads.
template <typename Model>
std::vector<TrainLogEntry> train_contrastive(Model& model, const std::vector<WordSegment>& segments,
                                             const std::vector<SegmentPair>& pairs, const TrainConfig& cfg,
                                             const TrainObserver& observer = {}) {
  using T = typename Model::Scalar;
  detail::check_pairs(segments, pairs);
  require(cfg.batch_size >= 1, ErrorCode::kInvalidArgument, "batch size must be at least 1");
  const auto frames = detail::cast_segments<T>(segments, model.input_dim());
  const std::size_t n = cfg.batch_size;
  const Index e = model.awe_dim();

  Rng rng(cfg.seed);
  nn::Adam<T> optimizer(model.params(), cfg.adam);
  std::vector<nn::ParameterStore<T>> item_grads(2 * n, model.params().zeros_like());
  std::vector<typename Model::Cache> caches(2 * n);
  nn::ParameterStore<T> grads = model.params().zeros_like();
  Matrix<T> emb(2 * static_cast<Index>(n), e);
  Matrix<T> d_emb(2 * static_cast<Index>(n), e);
  std::vector<TrainLogEntry> log;
  log.reserve(cfg.steps);
  const auto t0 = std::chrono::steady_clock::now();

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const auto batch = draw_distinct_label_batch(segments, pairs, n, rng);
    auto segment_of = [&](std::size_t b) {
      const auto& p = pairs[batch[b % n]];
      return b < n ? p.anchor : p.positive;
    };
    const auto items = static_cast<std::ptrdiff_t>(2 * n);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, cfg.threads))
    for (std::ptrdiff_t b = 0; b < items; ++b) {
      const auto& x = frames[segment_of(static_cast<std::size_t>(b))];
      emb.row(b) = model.forward(x, x.rows(), caches[static_cast<std::size_t>(b)]).transpose();
    }

    Matrix<T> d_anchor, d_positive;
    const T loss = nt_xent_loss<T>(emb.topRows(static_cast<Index>(n)), emb.bottomRows(static_cast<Index>(n)),
                                   T(cfg.temperature), &d_anchor, &d_positive);
    if (!std::isfinite(static_cast<double>(loss))) {
      std::string labels;
      for (std::size_t b = 0; b < n; ++b) labels += (b ? "," : "") + segments[segment_of(b)].label;
      fail(ErrorCode::kNonFiniteLoss, "NT-Xent loss is not finite at step " + std::to_string(step) +
                                          " (batch labels: " + labels + ")");
    }
    d_emb.topRows(static_cast<Index>(n)) = d_anchor;
    d_emb.bottomRows(static_cast<Index>(n)) = d_positive;

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, cfg.threads))
    for (std::ptrdiff_t b = 0; b < items; ++b) {
      auto& g = item_grads[static_cast<std::size_t>(b)];
      g.set_zero();
      model.backward(caches[static_cast<std::size_t>(b)], d_emb.row(b).transpose(), g);
    }
    detail::reduce_mean(grads, item_grads, T(1) / T(n));
    optimizer.step(model.params(), grads);

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.push_back({step, static_cast<double>(loss), elapsed});
    if (observer) observer(log.back());
  }
  return log;
}

// Correspondence training: each ordered pair (X, X') encodes X and
// reconstructs X'. Batches of batch_size pairs drawn uniformly; the loss is
// the batch mean of the per-pair mean squared error.
template <typename T>
std::vector<TrainLogEntry> train_reconstruction(CaeRnn<T>& model, const std::vector<WordSegment>& segments,
                                                const std::vector<SegmentPair>& pairs, const TrainConfig& cfg,
                                                const TrainObserver& observer = {}) {
  detail::check_pairs(segments, pairs);
  require(cfg.batch_size >= 1, ErrorCode::kInvalidArgument, "batch size must be at least 1");
  const auto frames = detail::cast_segments<T>(segments, model.input_dim());
  const std::size_t n = cfg.batch_size;

  Rng rng(cfg.seed);
  nn::Adam<T> optimizer(model.params(), cfg.adam);
  std::vector<nn::ParameterStore<T>> item_grads(n, model.params().zeros_like());
  std::vector<T> item_loss(n);
  nn::ParameterStore<T> grads = model.params().zeros_like();
  std::vector<TrainLogEntry> log;
  log.reserve(cfg.steps);
  const auto t0 = std::chrono::steady_clock::now();

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::vector<std::size_t> batch(n);
    for (auto& b : batch) b = static_cast<std::size_t>(rng.index(pairs.size()));
    const auto items = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, cfg.threads))
    for (std::ptrdiff_t b = 0; b < items; ++b) {
      const auto& p = pairs[batch[static_cast<std::size_t>(b)]];
      const auto& x = frames[p.anchor];
      const auto& target = frames[p.positive];
      typename CaeRnn<T>::Cache enc;
      typename CaeRnn<T>::DecoderCache dec;
      auto& g = item_grads[static_cast<std::size_t>(b)];
      g.set_zero();
      const Vector<T> awe = model.forward(x, x.rows(), enc);
      const Matrix<T> decoded = model.decode(awe, target.rows(), dec);
      Matrix<T> d_decoded;
      item_loss[static_cast<std::size_t>(b)] = reconstruction_loss<T>(decoded, target, &d_decoded);
      model.backward(enc, model.decode_backward(dec, d_decoded, g), g);
    }
    T loss = 0;
    for (T l : item_loss) loss += l;
    loss /= T(n);
    if (!std::isfinite(static_cast<double>(loss))) {
      fail(ErrorCode::kNonFiniteLoss, "reconstruction loss is not finite at step " + std::to_string(step));
    }
    detail::reduce_mean(grads, item_grads, T(1) / T(n));
    optimizer.step(model.params(), grads);

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.push_back({step, static_cast<double>(loss), elapsed});
    if (observer) observer(log.back());
  }
  return log;
}

}  // namespace awekws
