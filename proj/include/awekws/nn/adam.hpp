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

#include "awekws/error.hpp"
#include "awekws/nn/params.hpp"

namespace awekws::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment optimizer with bias correction. Holds the moment estimates
// and the step count; updates are a pure function of (params, grads, state).
template <typename T>
class Adam {
 public:
  Adam(const ParameterStore<T>& params, const AdamConfig& config)
      : config_(config), first_(params.zeros_like()), second_(params.zeros_like()) {}

  long steps() const { return step_; }
  const AdamConfig& config() const { return config_; }

  void step(ParameterStore<T>& params, const ParameterStore<T>& grads) {
    if (!grads.all_finite()) fail(ErrorCode::kNonFiniteGradient, "optimizer received a non-finite gradient");
    require(grads.same_layout(params), ErrorCode::kShapeMismatch, "gradient layout differs from parameters");
    ++step_;
    const T b1 = T(config_.beta1);
    const T b2 = T(config_.beta2);
    const T correction1 = T(1) - T(std::pow(config_.beta1, static_cast<double>(step_)));
    const T correction2 = T(1) - T(std::pow(config_.beta2, static_cast<double>(step_)));
    const T lr = T(config_.learning_rate);
    const T eps = T(config_.epsilon);
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto m = first_.value(i).array();
      auto v = second_.value(i).array();
      const auto g = grads.value(i).array();
      m = b1 * m + (T(1) - b1) * g;
      v = b2 * v + (T(1) - b2) * g.square();
      params.value(i).array() -= lr * (m / correction1) / ((v / correction2).sqrt() + eps);
    }
  }

 private:
  AdamConfig config_;
  ParameterStore<T> first_;
  ParameterStore<T> second_;
  long step_ = 0;
};

}  // namespace awekws::nn
