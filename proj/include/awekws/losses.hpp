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
#include <string>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/tensor.hpp"

namespace awekws {

namespace detail {

template <typename T>
Matrix<T> unit_rows(const MatrixCRef<T>& x, Vector<T>& norms, const char* what) {
  norms = x.rowwise().norm();
  for (Index i = 0; i < x.rows(); ++i) {
    if (!(norms(i) > T(0))) fail(ErrorCode::kZeroNormEmbedding, std::string(what) + " " + std::to_string(i) + " has zero norm");
  }
  return x.array().colwise() / norms.array();
}

// Pulls a gradient w.r.t. unit rows u = x / |x| back to x.
template <typename T>
Matrix<T> unit_rows_backward(const Matrix<T>& unit, const Vector<T>& norms, const Matrix<T>& d_unit) {
  const Vector<T> radial = (unit.array() * d_unit.array()).rowwise().sum();
  return (d_unit - (unit.array().colwise() * radial.array()).matrix()).array().colwise() / norms.array();
}

}  // namespace detail

// NT-Xent over N positive pairs, summed over anchors:
//   L_i = -log( exp(s(a_i, p_i) / tau) / sum_{w in W_i} exp(s(a_i, w) / tau) ),
// W_i = every positive plus every other anchor (2N - 1 terms), s = cosine.
// When the gradient outputs are non-null they receive dL/danchors and
// dL/dpositives.
template <typename T>
T nt_xent_loss(const MatrixCRef<T>& anchors, const MatrixCRef<T>& positives, T temperature,
               Matrix<T>* d_anchors = nullptr, Matrix<T>* d_positives = nullptr) {
  const Index n = anchors.rows();
  require(n >= 1, ErrorCode::kShapeMismatch, "NT-Xent needs at least one pair");
  require(positives.rows() == n && positives.cols() == anchors.cols(), ErrorCode::kShapeMismatch,
          "anchor and positive embeddings differ in shape");
  require(temperature > T(0), ErrorCode::kInvalidArgument, "temperature must be positive");

  Vector<T> na, np;
  const Matrix<T> ua = detail::unit_rows<T>(anchors, na, "anchor");
  const Matrix<T> up = detail::unit_rows<T>(positives, np, "positive");
  const Matrix<T> to_pos = (ua * up.transpose()) / temperature;  // N x N
  const Matrix<T> to_anc = (ua * ua.transpose()) / temperature;

  Matrix<T> w_pos(n, n), w_anc(n, n);  // softmax weights over W_i, row i
  T total = 0;
  for (Index i = 0; i < n; ++i) {
    T m = to_pos.row(i).maxCoeff();
    for (Index j = 0; j < n; ++j) {
      if (j != i) m = std::max(m, to_anc(i, j));
    }
    T sum = 0;
    for (Index k = 0; k < n; ++k) sum += std::exp(to_pos(i, k) - m);
    for (Index j = 0; j < n; ++j) {
      if (j != i) sum += std::exp(to_anc(i, j) - m);
    }
    const T lse = m + std::log(sum);
    total += lse - to_pos(i, i);
    for (Index k = 0; k < n; ++k) w_pos(i, k) = std::exp(to_pos(i, k) - lse);
    for (Index j = 0; j < n; ++j) w_anc(i, j) = j == i ? T(0) : std::exp(to_anc(i, j) - lse);
  }

  if (d_anchors != nullptr || d_positives != nullptr) {
    const Matrix<T> g_pos = w_pos - Matrix<T>::Identity(n, n);
    const Matrix<T> d_ua = (g_pos * up + w_anc * ua + w_anc.transpose() * ua) / temperature;
    const Matrix<T> d_up = (g_pos.transpose() * ua) / temperature;
    if (d_anchors != nullptr) *d_anchors = detail::unit_rows_backward(ua, na, d_ua);
    if (d_positives != nullptr) *d_positives = detail::unit_rows_backward(up, np, d_up);
  }
  return total;
}

// Mean squared error over all entries.
template <typename T>
T reconstruction_loss(const MatrixCRef<T>& decoded, const MatrixCRef<T>& target, Matrix<T>* d_decoded = nullptr) {
  if (decoded.rows() != target.rows() || decoded.cols() != target.cols()) {
    fail(ErrorCode::kShapeMismatch, "decoded " + std::to_string(decoded.rows()) + "x" +
                                        std::to_string(decoded.cols()) + " vs target " +
                                        std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  }
  require(decoded.size() > 0, ErrorCode::kShapeMismatch, "empty reconstruction");
  const Matrix<T> diff = decoded - target;
  const T count = T(diff.size());
  if (d_decoded != nullptr) *d_decoded = (T(2) / count) * diff;
  return diff.squaredNorm() / count;
}

// Same-different discrimination: ranks every unordered pair of embeddings by
// cosine similarity (descending) and returns the average precision of
// same-label pairs. Tied similarities keep pair enumeration order.
double same_different_ap(const std::vector<Vector<float>>& embeddings, const std::vector<std::string>& labels);

}  // namespace awekws
