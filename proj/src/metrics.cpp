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

#include "awekws/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "awekws/error.hpp"

namespace awekws {

double ranked_average_precision(std::span<const char> relevant, std::size_t n_relevant) {
  if (n_relevant == 0) fail(ErrorCode::kNoRelevantUtterances, "average precision needs a relevant item");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < relevant.size(); ++r) {
    if (relevant[r]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(n_relevant);
}

const std::set<std::string>& GroundTruth::of(const std::string& keyword) const {
  static const std::set<std::string> kEmpty;
  auto it = relevant.find(keyword);
  return it == relevant.end() ? kEmpty : it->second;
}

std::vector<Detection> canonical_order(const RankedDetections& ranked) {
  std::vector<Detection> d = ranked.detections;
  std::sort(d.begin(), d.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.utterance_id < b.utterance_id;
  });
  return d;
}

namespace {

std::vector<char> relevance(const std::vector<Detection>& ordered, const std::set<std::string>& relevant) {
  std::vector<char> rel(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) rel[i] = relevant.contains(ordered[i].utterance_id) ? 1 : 0;
  return rel;
}

PrecisionAt precision_of(const std::vector<char>& rel, std::size_t cutoff) {
  PrecisionAt p;
  const std::size_t n = std::min(cutoff, rel.size());
  p.truncated = rel.size() < cutoff;
  if (n == 0) return p;
  const auto hits = std::count(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(n), char{1});
  p.value = static_cast<double>(hits) / static_cast<double>(n);
  return p;
}

}  // namespace

double average_precision(const RankedDetections& ranked, const std::set<std::string>& relevant) {
  if (relevant.empty()) {
    fail(ErrorCode::kNoRelevantUtterances, "keyword '" + ranked.keyword + "' has no relevant utterances");
  }
  const auto rel = relevance(canonical_order(ranked), relevant);
  return ranked_average_precision(rel, relevant.size());
}

PrecisionAt precision_at(const RankedDetections& ranked, const std::set<std::string>& relevant, std::size_t cutoff) {
  if (relevant.empty()) {
    fail(ErrorCode::kNoRelevantUtterances, "keyword '" + ranked.keyword + "' has no relevant utterances");
  }
  require(cutoff >= 1, ErrorCode::kInvalidArgument, "precision cutoff must be at least 1");
  return precision_of(relevance(canonical_order(ranked), relevant), cutoff);
}

MetricsReport evaluate(const std::vector<RankedDetections>& rankings, const GroundTruth& truth,
                       std::size_t min_occurrences) {
  std::map<std::string, const RankedDetections*> by_keyword;
  bool overlap = false;
  for (const auto& r : rankings) {
    by_keyword[r.keyword] = &r;
    overlap = overlap || truth.relevant.contains(r.keyword);
  }
  if (!overlap) fail(ErrorCode::kNoKeywordsSurviveFilter, "no ranked keyword appears in the ground truth");

  MetricsReport report;
  for (const auto& [keyword, ranked] : by_keyword) {
    const auto& relevant = truth.of(keyword);
    KeywordMetrics m;
    m.keyword = keyword;
    m.n_relevant = relevant.size();
    m.kept = m.n_relevant >= std::max<std::size_t>(1, min_occurrences);
    if (m.n_relevant > 0) {
      const auto rel = relevance(canonical_order(*ranked), relevant);
      m.ap = ranked_average_precision(rel, relevant.size());
      const auto p10 = precision_of(rel, 10);
      m.p_at_10 = p10.value;
      m.p_at_10_truncated = p10.truncated;
      m.p_at_n = precision_of(rel, relevant.size()).value;
    }
    if (m.kept) report.kept_keywords.push_back(keyword);
    report.keywords.push_back(std::move(m));
  }
  if (report.kept_keywords.empty()) {
    fail(ErrorCode::kNoKeywordsSurviveFilter,
         "no keyword has at least " + std::to_string(min_occurrences) + " relevant utterances");
  }
  double sum_ap = 0, sum_p10 = 0, sum_pn = 0;
  for (const auto& m : report.keywords) {
    if (!m.kept) continue;
    sum_ap += m.ap;
    sum_p10 += m.p_at_10;
    sum_pn += m.p_at_n;
  }
  const double n = static_cast<double>(report.kept_keywords.size());
  report.map = sum_ap / n;
  report.mean_p_at_10 = sum_p10 / n;
  report.mean_p_at_n = sum_pn / n;
  return report;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& m : report.keywords) {
    per.push_back({{"keyword", m.keyword},
                   {"ap", m.ap},
                   {"p_at_10", m.p_at_10},
                   {"p_at_n", m.p_at_n},
                   {"n", m.n_relevant},
                   {"kept", m.kept},
                   {"p_at_10_truncated", m.p_at_10_truncated}});
  }
  const nlohmann::json j = {{"map", report.map},
                            {"mean_p_at_10", report.mean_p_at_10},
                            {"mean_p_at_n", report.mean_p_at_n},
                            {"kept_keywords", report.kept_keywords},
                            {"keywords", std::move(per)}};
  return j.dump(2) + "\n";
}

std::string report_to_table(const MetricsReport& report) {
  std::ostringstream out;
  out << "keyword\tAP\tP@10\tP@N\tN\n";
  char buf[128];
  for (const auto& m : report.keywords) {
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f\t%.6f\t%zu\n", m.ap, m.p_at_10, m.p_at_n, m.n_relevant);
    out << m.keyword << buf;
  }
  return out.str();
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open ground truth " + path);
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto& set = truth.relevant[j.at("keyword").get<std::string>()];
      for (const auto& id : j.at("utterances")) set.insert(id.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return truth;
}

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kMissingFile, "cannot create " + path);
  for (const auto& [keyword, ids] : truth.relevant) {
    out << nlohmann::json{{"keyword", keyword}, {"utterances", ids}}.dump() << '\n';
  }
}

GroundTruth ground_truth_from_alignments(const Corpus& corpus) {
  GroundTruth truth;
  for (const auto& u : corpus) {
    for (const auto& w : u.words) truth.relevant[w.label].insert(u.utterance_id);
  }
  return truth;
}

}  // namespace awekws
