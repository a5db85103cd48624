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

#include <utility>
#include <vector>

#include "awekws/tensor.hpp"

namespace awekws {

struct DtwResult {
  double cost = 0.0;                             // path-length-normalized, in [0, 1]
  std::vector<std::pair<Index, Index>> path;     // (template/a frame, b frame)
  Index region_start = 0;                        // matched frames of the searched sequence
  Index region_end = 0;                          // exclusive
};

// Local distance (1 - cos(a_i, b_j)) / 2 for every frame pair. Throws
// ZeroNormFrame for an all-zero frame, DimMismatch for differing dims.
Matrix<double> cosine_distance_matrix(const MatrixCRef<float>& a, const MatrixCRef<float>& b);

// Full alignment from (0, 0) to (Ta-1, Tb-1) with steps (1,0), (0,1), (1,1).
// The returned cost is the minimum over all such paths of
// (sum of local distances on the path) / (number of cells on the path).
DtwResult dtw_cost(const MatrixCRef<float>& a, const MatrixCRef<float>& b);

// Subsequence alignment: the template is matched in full against the best
// contiguous region of the utterance (free start and end on the utterance
// axis). Equals the minimum of dtw_cost(template, slice) over all slices.
DtwResult dtw_search(const MatrixCRef<float>& templ, const MatrixCRef<float>& utterance);

}  // namespace awekws
