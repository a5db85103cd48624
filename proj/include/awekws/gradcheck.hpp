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
#include <string>
#include <vector>

namespace awekws {

// Central finite differences in double precision against the hand-written
// backward passes. An entry passes when
//   |analytic - numeric| / max(|analytic|, |numeric|, floor) <= tolerance.
struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  double floor = 1e-5;  // keeps roundoff on near-zero gradients from counting as error
  std::size_t trials = 20;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  std::string target;
  std::size_t trials = 0;
  std::size_t entries = 0;   // coordinates compared
  std::size_t failures = 0;  // coordinates over tolerance
  double max_relative_error = 0.0;

  bool passed() const { return entries > 0 && failures == 0; }
};

inline const std::vector<std::string>& gradcheck_targets() {
  static const std::vector<std::string> kTargets = {"nt-xent", "reconstruction", "contrastive-transformer",
                                                    "contrastive-rnn", "cae-rnn"};
  return kTargets;
}

// Every trial draws fresh random inputs (and a fresh small model), then checks
// one coordinate of every input/parameter tensor.
GradCheckReport gradcheck(const std::string& target, const GradCheckOptions& options = {});
std::vector<GradCheckReport> gradcheck_all(const GradCheckOptions& options = {});

}  // namespace awekws
