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

#include "awekws/dtw.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "awekws/error.hpp"

namespace awekws {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Step : std::uint8_t { kDiagonal = 0, kUp = 1, kLeft = 2, kOrigin = 3 };

void check_inputs(const MatrixCRef<float>& a, const MatrixCRef<float>& b) {
  if (a.rows() < 1 || b.rows() < 1) fail(ErrorCode::kEmptySequence, "DTW needs non-empty sequences");
  if (a.cols() != b.cols()) {
    fail(ErrorCode::kDimMismatch,
         "DTW inputs have dims " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()));
  }
}

Matrix<double> unit_rows(const MatrixCRef<float>& x, const char* which) {
  Matrix<double> u = x.cast<double>();
  for (Index i = 0; i < u.rows(); ++i) {
    const double n = u.row(i).norm();
    if (!(n > 0.0)) fail(ErrorCode::kZeroNormFrame, std::string(which) + " frame " + std::to_string(i) + " is all zeros");
    u.row(i) /= n;
  }
  return u;
}

}  // namespace

Matrix<double> cosine_distance_matrix(const MatrixCRef<float>& a, const MatrixCRef<float>& b) {
  check_inputs(a, b);
  const Matrix<double> ua = unit_rows(a, "first sequence");
  const Matrix<double> ub = unit_rows(b, "second sequence");
  Matrix<double> d(a.rows(), b.rows());
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) {
      d(i, j) = std::clamp((1.0 - ua.row(i).dot(ub.row(j))) / 2.0, 0.0, 1.0);
    }
  }
  return d;
}

// The DP runs over path length L (number of cells): S_L(i, j) is the minimum
// distance sum over paths of exactly L cells ending at (i, j). The normalized
// optimum is min_L S_L(end) / L, which plain sum-minimizing DTW does not give.
DtwResult dtw_cost(const MatrixCRef<float>& a, const MatrixCRef<float>& b) {
  const Matrix<double> d = cosine_distance_matrix(a, b);
  const Index ta = d.rows();
  const Index tb = d.cols();
  const Index max_len = ta + tb - 1;
  const std::size_t cells = static_cast<std::size_t>(ta * tb);

  std::vector<double> prev(cells, kInf), cur(cells, kInf);
  std::vector<std::uint8_t> back(cells * static_cast<std::size_t>(max_len), kOrigin);
  prev[0] = d(0, 0);

  double best = ta == 1 && tb == 1 ? d(0, 0) : kInf;
  Index best_len = 1;
  for (Index len = 2; len <= max_len; ++len) {
    std::uint8_t* bp = back.data() + cells * static_cast<std::size_t>(len - 1);
    std::fill(cur.begin(), cur.end(), kInf);
    // Cells reachable by exactly len cells satisfy max(i, j) <= len-1 <= i + j.
    for (Index i = 0; i < std::min(ta, len); ++i) {
      const Index j_lo = std::max<Index>(0, len - 1 - i);
      const Index j_hi = std::min(tb - 1, len - 1);
      for (Index j = j_lo; j <= j_hi; ++j) {
        double m = kInf;
        std::uint8_t step = kOrigin;
        if (i > 0 && j > 0 && prev[(i - 1) * tb + j - 1] < m) {
          m = prev[(i - 1) * tb + j - 1];
          step = kDiagonal;
        }
        if (i > 0 && prev[(i - 1) * tb + j] < m) {
          m = prev[(i - 1) * tb + j];
          step = kUp;
        }
        if (j > 0 && prev[i * tb + j - 1] < m) {
          m = prev[i * tb + j - 1];
          step = kLeft;
        }
        if (m < kInf) {
          cur[i * tb + j] = m + d(i, j);
          bp[i * tb + j] = step;
        }
      }
    }
    const double candidate = cur[cells - 1] / static_cast<double>(len);
    if (candidate < best) {
      best = candidate;
      best_len = len;
    }
    std::swap(prev, cur);
  }

  DtwResult result;
  result.cost = best;
  result.region_start = 0;
  result.region_end = tb;
  Index i = ta - 1;
  Index j = tb - 1;
  for (Index len = best_len; len >= 1; --len) {
    result.path.emplace_back(i, j);
    if (len == 1) break;
    const auto step = back[cells * static_cast<std::size_t>(len - 1) + static_cast<std::size_t>(i * tb + j)];
    if (step != kLeft) --i;
    if (step != kUp) --j;
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

DtwResult dtw_search(const MatrixCRef<float>& templ, const MatrixCRef<float>& utterance) {
  const Matrix<double> d = cosine_distance_matrix(templ, utterance);
  const Index ta = d.rows();
  const Index tb = d.cols();
  const Index max_len = ta + tb - 1;
  const std::size_t cells = static_cast<std::size_t>(ta * tb);

  // start[] carries the utterance frame where each partial path began.
  std::vector<double> prev(cells, kInf), cur(cells, kInf);
  std::vector<Index> prev_start(cells, 0), cur_start(cells, 0);
  for (Index j = 0; j < tb; ++j) {
    prev[j] = d(0, j);
    prev_start[j] = j;
  }

  double best = kInf;
  Index best_end = 0;
  Index best_start = 0;
  if (ta == 1) {
    for (Index j = 0; j < tb; ++j) {
      if (prev[j] < best) {
        best = prev[j];
        best_end = j;
        best_start = j;
      }
    }
  }
  for (Index len = 2; len <= max_len; ++len) {
    std::fill(cur.begin(), cur.end(), kInf);
    for (Index i = 0; i < std::min(ta, len); ++i) {
      for (Index j = 0; j < tb; ++j) {
        double m = kInf;
        Index s = 0;
        if (i > 0 && j > 0 && prev[(i - 1) * tb + j - 1] < m) {
          m = prev[(i - 1) * tb + j - 1];
          s = prev_start[(i - 1) * tb + j - 1];
        }
        if (i > 0 && prev[(i - 1) * tb + j] < m) {
          m = prev[(i - 1) * tb + j];
          s = prev_start[(i - 1) * tb + j];
        }
        if (j > 0 && prev[i * tb + j - 1] < m) {
          m = prev[i * tb + j - 1];
          s = prev_start[i * tb + j - 1];
        }
        if (m < kInf) {
          cur[i * tb + j] = m + d(i, j);
          cur_start[i * tb + j] = s;
        }
      }
    }
    const std::size_t last_row = static_cast<std::size_t>((ta - 1) * tb);
    for (Index j = 0; j < tb; ++j) {
      const double candidate = cur[last_row + j] / static_cast<double>(len);
      if (candidate < best) {
        best = candidate;
        best_end = j;
        best_start = cur_start[last_row + j];
      }
    }
    std::swap(prev, cur);
    std::swap(prev_start, cur_start);
  }

  // Recover the path by aligning against the winning region alone; its
  // optimum is the same value.
  DtwResult result = dtw_cost(templ, utterance.middleRows(best_start, best_end - best_start + 1));
  for (auto& cell : result.path) cell.second += best_start;
  result.cost = best;
  result.region_start = best_start;
  result.region_end = best_end + 1;
  return result;
}

}  // namespace awekws
