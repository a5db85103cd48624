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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "awekws/kws.hpp"

namespace awekws {

// Mean over relevant ranks r of (relevant items in the top r) / r.
// `relevant` is in rank order; `n_relevant` is the total number of relevant
// items (those missing from the ranking count as never retrieved).
double ranked_average_precision(std::span<const char> relevant, std::size_t n_relevant);

struct GroundTruth {
  std::map<std::string, std::set<std::string>> relevant;  // keyword -> utterance ids containing it

  const std::set<std::string>& of(const std::string& keyword) const;
};

struct PrecisionAt {
  double value = 0.0;
  bool truncated = false;  // ranking was shorter than the cutoff
};

// Detections re-sorted by descending score, ties by utterance id ascending.
std::vector<Detection> canonical_order(const RankedDetections& ranked);

double average_precision(const RankedDetections& ranked, const std::set<std::string>& relevant);
PrecisionAt precision_at(const RankedDetections& ranked, const std::set<std::string>& relevant, std::size_t cutoff);

struct KeywordMetrics {
  std::string keyword;
  double ap = 0.0;
  double p_at_10 = 0.0;
  double p_at_n = 0.0;
  std::size_t n_relevant = 0;
  bool kept = false;
  bool p_at_10_truncated = false;
};

struct MetricsReport {
  std::vector<KeywordMetrics> keywords;  // sorted by keyword
  double map = 0.0;
  double mean_p_at_10 = 0.0;
  double mean_p_at_n = 0.0;
  std::vector<std::string> kept_keywords;
};

// Keywords with fewer than min_occurrences relevant utterances are reported
// but excluded from the means.
MetricsReport evaluate(const std::vector<RankedDetections>& rankings, const GroundTruth& truth,
                       std::size_t min_occurrences = 10);

std::string report_to_json(const MetricsReport& report);
std::string report_to_table(const MetricsReport& report);  // keyword\tAP\tP@10\tP@N\tN

// Ground-truth file: one JSON object per line, {"keyword": k, "utterances": [ids]}.
GroundTruth read_ground_truth(const std::string& path);
void write_ground_truth(const GroundTruth& truth, const std::string& path);
// Every word label in the corpus' alignments becomes a keyword.
GroundTruth ground_truth_from_alignments(const Corpus& corpus);

}  // namespace awekws
