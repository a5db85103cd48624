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

#include "awekws/train.hpp"

#include <set>

namespace awekws {

std::vector<std::size_t> draw_distinct_label_batch(const std::vector<WordSegment>& segments,
                                                   const std::vector<SegmentPair>& pairs, std::size_t n, Rng& rng) {
  detail::check_pairs(segments, pairs);
  std::set<std::string> available;
  for (const auto& p : pairs) available.insert(segments[p.anchor].label);
  if (available.size() < n) {
    fail(ErrorCode::kInvalidArgument, "batch of " + std::to_string(n) + " needs as many word types, pairs cover " +
                                          std::to_string(available.size()));
  }
  std::vector<std::size_t> batch;
  batch.reserve(n);
  std::set<std::string> used;
  while (batch.size() < n) {
    const auto k = static_cast<std::size_t>(rng.index(pairs.size()));
    if (used.insert(segments[pairs[k].anchor].label).second) batch.push_back(k);
  }
  return batch;
}

template std::vector<TrainLogEntry> train_contrastive(ContrastiveTransformer<float>&, const std::vector<WordSegment>&,
                                                      const std::vector<SegmentPair>&, const TrainConfig&,
                                                      const TrainObserver&);
template std::vector<TrainLogEntry> train_contrastive(ContrastiveTransformer<double>&, const std::vector<WordSegment>&,
                                                      const std::vector<SegmentPair>&, const TrainConfig&,
                                                      const TrainObserver&);
template std::vector<TrainLogEntry> train_contrastive(ContrastiveRnn<float>&, const std::vector<WordSegment>&,
                                                      const std::vector<SegmentPair>&, const TrainConfig&,
                                                      const TrainObserver&);
template std::vector<TrainLogEntry> train_contrastive(ContrastiveRnn<double>&, const std::vector<WordSegment>&,
                                                      const std::vector<SegmentPair>&, const TrainConfig&,
                                                      const TrainObserver&);
template std::vector<TrainLogEntry> train_reconstruction(CaeRnn<float>&, const std::vector<WordSegment>&,
                                                         const std::vector<SegmentPair>&, const TrainConfig&,
                                                         const TrainObserver&);
template std::vector<TrainLogEntry> train_reconstruction(CaeRnn<double>&, const std::vector<WordSegment>&,
                                                         const std::vector<SegmentPair>&, const TrainConfig&,
                                                         const TrainObserver&);

}  // namespace awekws
