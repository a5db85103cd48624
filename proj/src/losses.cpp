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

#include "awekws/losses.hpp"

#include <algorithm>
#include <numeric>

#include "awekws/metrics.hpp"

namespace awekws {

double same_different_ap(const std::vector<Vector<float>>& embeddings, const std::vector<std::string>& labels) {
  require(embeddings.size() == labels.size(), ErrorCode::kShapeMismatch, "one label per embedding is required");
  require(embeddings.size() >= 2, ErrorCode::kNoSameLabelPairs, "same-different needs at least two embeddings");
  const std::size_t n = embeddings.size();
  std::vector<Vector<double>> unit(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(embeddings[i].size() == embeddings[0].size(), ErrorCode::kDimMismatch, "embeddings differ in size");
    unit[i] = embeddings[i].cast<double>();
    const double norm = unit[i].norm();
    if (!(norm > 0.0)) fail(ErrorCode::kZeroNormEmbedding, "embedding " + std::to_string(i) + " has zero norm");
    unit[i] /= norm;
  }

  struct PairScore {
    double similarity;
    char same;
  };
  std::vector<PairScore> pairs;
  pairs.reserve(n * (n - 1) / 2);
  std::size_t n_same = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const char same = labels[i] == labels[j] ? 1 : 0;
      n_same += static_cast<std::size_t>(same);
      pairs.push_back({unit[i].dot(unit[j]), same});
    }
  }
  if (n_same == 0) fail(ErrorCode::kNoSameLabelPairs, "no two embeddings share a label");
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairScore& a, const PairScore& b) { return a.similarity > b.similarity; });
  std::vector<char> rel(pairs.size());
  std::transform(pairs.begin(), pairs.end(), rel.begin(), [](const PairScore& p) { return p.same; });
  return ranked_average_precision(rel, n_same);
}

}  // namespace awekws
