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

#include <doctest.h>

#include <functional>

#include "awekws/error.hpp"
#include "awekws/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace awekws;

namespace {

RankedDetections ranking(const std::string& keyword, const std::vector<std::pair<std::string, double>>& items) {
  RankedDetections r{keyword, {}};
  for (const auto& [id, score] : items) r.detections.push_back({keyword, id, score, {}, 0});
  rank(r);
  return r;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("average precision by hand") {
  const auto r = ranking("k", {{"a", 0.9}, {"b", 0.8}, {"c", 0.7}});
  CHECK(std::abs(average_precision(r, {"a", "c"}) - (1.0 + 2.0 / 3.0) / 2.0) < 1e-15);
  CHECK(average_precision(r, {"a", "b"}) == 1.0);
  CHECK(code_of([&] { average_precision(r, {}); }) == ErrorCode::kNoRelevantUtterances);
  // A relevant utterance missing from the ranking counts as never retrieved.
  CHECK(average_precision(r, {"a", "zz"}) == 0.5);
}

TEST_CASE("precision at a cutoff") {
  std::vector<std::pair<std::string, double>> items;
  std::set<std::string> relevant;
  for (int i = 0; i < 12; ++i) {
    items.push_back({"u" + std::to_string(100 + i), 1.0 - 0.01 * i});
    if (i < 10) relevant.insert("u" + std::to_string(100 + i));
  }
  CHECK(precision_at(ranking("k", items), relevant, 10).value == 1.0);

  const auto four = ranking("k", {{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}, {"e", 0}});
  CHECK(precision_at(four, {"a", "b", "d", "e"}, 4).value == 0.75);

  const auto p = precision_at(four, {"a"}, 10);
  CHECK(p.truncated);
  CHECK(p.value == 0.2);
}

TEST_CASE("metrics equal the counting oracle on random rankings") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(40);
    std::vector<oracle::Ranked> items;
    std::vector<std::pair<std::string, double>> pairs;
    std::set<std::string> relevant;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "u" + std::to_string(rng.index(1000000)) + "_" + std::to_string(i);
      const double score = static_cast<double>(rng.index(6)) / 5.0;  // coarse scores force ties
      const bool rel = rng.uniform() < 0.4;
      items.push_back({id, score, rel});
      pairs.push_back({id, score});
      if (rel) relevant.insert(id);
    }
    if (relevant.empty()) continue;
    const auto r = ranking("k", pairs);
    CHECK(std::abs(average_precision(r, relevant) - oracle::average_precision(items, relevant.size())) <= 1e-12);
    CHECK(std::abs(precision_at(r, relevant, 10).value - oracle::precision_at(items, 10)) <= 1e-12);
    CHECK(std::abs(precision_at(r, relevant, relevant.size()).value - oracle::precision_at(items, relevant.size())) <=
          1e-12);
  }
}

TEST_CASE("evaluate aggregates kept keywords only") {
  GroundTruth truth;
  std::vector<std::pair<std::string, double>> items;
  for (int i = 0; i < 30; ++i) items.push_back({"u" + std::to_string(100 + i), 1.0 - 0.01 * i});
  for (int i = 0; i < 12; ++i) truth.relevant["perfect"].insert("u" + std::to_string(100 + i));
  for (int i = 0; i < 9; ++i) truth.relevant["rare"].insert("u" + std::to_string(100 + i));

  SUBCASE("single perfect keyword") {
    const auto report = evaluate({ranking("perfect", items)}, truth);
    CHECK(report.map == 1.0);
    CHECK(report.mean_p_at_10 == 1.0);
    CHECK(report.mean_p_at_n == 1.0);
  }
  SUBCASE("N = 9 is listed but not aggregated") {
    const auto report = evaluate({ranking("perfect", items), ranking("rare", items)}, truth);
    CHECK(report.kept_keywords == std::vector<std::string>{"perfect"});
    REQUIRE(report.keywords.size() == 2);
    CHECK(report.keywords[1].keyword == "rare");
    CHECK(!report.keywords[1].kept);
    CHECK(report.keywords[1].n_relevant == 9);
  }
  SUBCASE("MAP is the mean of kept APs") {
    // "half": relevant utterances sit at ranks 2, 4, ..., 20: AP = 0.5.
    for (int i = 1; i < 20; i += 2) truth.relevant["half"].insert("u" + std::to_string(100 + i));
    const auto report = evaluate({ranking("perfect", items), ranking("half", items)}, truth);
    CHECK(std::abs(report.keywords[0].ap - 0.5) < 1e-15);
    CHECK(std::abs(report.map - 0.75) < 1e-15);
  }
  SUBCASE("nothing to evaluate") {
    CHECK(code_of([&] { evaluate({ranking("other", items)}, truth); }) == ErrorCode::kNoKeywordsSurviveFilter);
    CHECK(code_of([&] { evaluate({ranking("rare", items)}, truth); }) == ErrorCode::kNoKeywordsSurviveFilter);
  }
}

TEST_CASE("report serialization and ground truth files") {
  GroundTruth truth;
  std::vector<std::pair<std::string, double>> items;
  for (int i = 0; i < 10; ++i) {
    items.push_back({"u" + std::to_string(i), 1.0 - 0.1 * i});
    truth.relevant["k"].insert("u" + std::to_string(i));
  }
  const auto report = evaluate({ranking("k", items)}, truth);
  CHECK(report_to_json(report) == report_to_json(evaluate({ranking("k", items)}, truth)));
  CHECK(report_to_table(report) == "keyword\tAP\tP@10\tP@N\tN\nk\t1.000000\t1.000000\t1.000000\t10\n");

  awekws::testing::TempDir dir("truth");
  write_ground_truth(truth, (dir / "t.jsonl").string());
  CHECK(read_ground_truth((dir / "t.jsonl").string()).relevant == truth.relevant);
  CHECK(code_of([&] { read_ground_truth((dir / "none.jsonl").string()); }) == ErrorCode::kMissingFile);

  Corpus c(2);
  c[0].utterance_id = "a";
  c[0].words = {{"x", 0, 1}, {"y", 1, 2}};
  c[1].utterance_id = "b";
  c[1].words = {{"x", 0, 1}};
  const auto g = ground_truth_from_alignments(c);
  CHECK(g.of("x") == std::set<std::string>{"a", "b"});
  CHECK(g.of("y") == std::set<std::string>{"a"});
  CHECK(g.of("z").empty());
}
