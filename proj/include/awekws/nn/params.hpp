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
#include <unordered_map>
#include <utility>
#include <vector>

#include "awekws/error.hpp"
#include "awekws/rng.hpp"
#include "awekws/tensor.hpp"

namespace awekws::nn {

// Handle to one tensor inside a ParameterStore. Handles stay valid across
// copies and casts of the store because they are positional.
struct ParamId {
  std::size_t index = 0;
};

// Named tensors in registration order. Vectors are stored as 1 x n matrices.
template <typename T>
class ParameterStore {
 public:
  using Scalar = T;

  ParamId add(const std::string& name, Index rows, Index cols) {
    require(rows > 0 && cols > 0, ErrorCode::kShapeMismatch, "parameter '" + name + "' has an empty shape");
    require(!index_.contains(name), ErrorCode::kInvalidArgument, "duplicate parameter name '" + name + "'");
    index_.emplace(name, names_.size());
    names_.push_back(name);
    values_.push_back(Matrix<T>::Zero(rows, cols));
    return ParamId{names_.size() - 1};
  }

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Matrix<T>& value(std::size_t i) { return values_[i]; }
  const Matrix<T>& value(std::size_t i) const { return values_[i]; }
  Matrix<T>& operator[](ParamId id) { return values_[id.index]; }
  const Matrix<T>& operator[](ParamId id) const { return values_[id.index]; }

  bool contains(const std::string& name) const { return index_.contains(name); }
  ParamId find(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorCode::kCheckpointFormat, "no parameter named '" + name + "'");
    return ParamId{it->second};
  }

  std::size_t num_scalars() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
    return n;
  }

  ParameterStore zeros_like() const {
    ParameterStore out = *this;
    out.set_zero();
    return out;
  }

  void set_zero() {
    for (auto& v : values_) v.setZero();
  }

  // this += scale * other; layouts must match.
  void add_scaled(const ParameterStore& other, T scale) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i].noalias() += scale * other.values_[i];
  }

  bool all_finite() const {
    for (const auto& v : values_) {
      if (!v.allFinite()) return false;
    }
    return true;
  }

  bool same_layout(const ParameterStore& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (names_[i] != other.names_[i] || values_[i].rows() != other.values_[i].rows() ||
          values_[i].cols() != other.values_[i].cols()) {
        return false;
      }
    }
    return true;
  }

  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (std::size_t i = 0; i < size(); ++i) {
      out.add(names_[i], values_[i].rows(), values_[i].cols());
      out.value(i) = values_[i].template cast<U>();
    }
    return out;
  }

  // Copies values from `source` by name; every parameter of this store must be
  // present there with the same shape.
  template <typename U>
  void assign_from(const ParameterStore<U>& source) {
    for (std::size_t i = 0; i < size(); ++i) {
      const auto& src = source[source.find(names_[i])];
      if (src.rows() != values_[i].rows() || src.cols() != values_[i].cols()) {
        fail(ErrorCode::kShapeMismatch, "parameter '" + names_[i] + "' has shape " + std::to_string(src.rows()) +
                                            "x" + std::to_string(src.cols()) + ", expected " +
                                            std::to_string(values_[i].rows()) + "x" +
                                            std::to_string(values_[i].cols()));
      }
      values_[i] = src.template cast<T>();
    }
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix<T>> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Glorot-uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)); rows are fan_out.
template <typename T>
void init_glorot(ParameterStore<T>& store, ParamId id, Rng& rng) {
  auto& w = store[id];
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.uniform(-a, a));
}

template <typename T>
void init_constant(ParameterStore<T>& store, ParamId id, T value) {
  store[id].setConstant(value);
}

}  // namespace awekws::nn
