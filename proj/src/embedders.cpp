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

#include "awekws/embedders.hpp"

namespace awekws {

Vector<float> meanpool(const MatrixCRef<float>& frames) {
  if (frames.rows() < 1) fail(ErrorCode::kEmptySequence, "meanpool of an empty sequence");
  // Accumulate in double so long windows do not lose precision.
  return (frames.cast<double>().colwise().sum() / static_cast<double>(frames.rows())).transpose().cast<float>();
}

std::vector<Index> subsample_indices(Index num_frames, Index k) {
  if (num_frames < 1) fail(ErrorCode::kEmptySequence, "subsample of an empty sequence");
  require(k >= 1, ErrorCode::kInvalidArgument, "subsample K must be at least 1");
  std::vector<Index> idx(static_cast<std::size_t>(k), 0);
  if (k == 1 || num_frames == 1) return idx;
  // round(i (T-1) / (K-1)) in exact integer arithmetic; the operands are
  // non-negative so half-up equals half-away-from-zero.
  const Index den = k - 1;
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = (2 * i * (num_frames - 1) + den) / (2 * den);
  return idx;
}

Vector<float> subsample(const MatrixCRef<float>& frames, Index k) {
  const auto idx = subsample_indices(frames.rows(), k);
  const Index d = frames.cols();
  Vector<float> out(k * d);
  for (Index i = 0; i < k; ++i) out.segment(i * d, d) = frames.row(idx[static_cast<std::size_t>(i)]).transpose();
  return out;
}

std::unique_ptr<Embedder> make_builtin_embedder(std::string_view id, Index subsample_k) {
  if (id == kMeanpoolId) return std::make_unique<MeanpoolEmbedder>();
  if (id == kSubsampleId) return std::make_unique<SubsampleEmbedder>(subsample_k);
  fail(ErrorCode::kInvalidArgument, "'" + std::string(id) + "' is not a parameter-free embedder");
}

template class ContrastiveTransformer<float>;
template class ContrastiveTransformer<double>;
template class ContrastiveRnn<float>;
template class ContrastiveRnn<double>;
template class CaeRnn<float>;
template class CaeRnn<double>;

}  // namespace awekws
