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

#include <set>

#include "awekws/dtw.hpp"
#include "awekws/synthetic.hpp"

using namespace awekws;

TEST_CASE("prototypes") {
  SyntheticLanguage lang(SyntheticConfig{});
  CHECK(lang.label(3) == "w03");
  CHECK(lang.speaker(11) == "spk11");
  for (std::size_t k = 0; k < 20; ++k) {
    const auto& p = lang.prototype(k);
    CHECK(p.cols() == 16);
    CHECK(p.rows() >= 20);
    CHECK(p.rows() <= 60);
    CHECK(p.colwise().mean().cwiseAbs().maxCoeff() < 1e-5);
    CHECK(std::abs(std::sqrt(p.squaredNorm() / static_cast<double>(p.size())) - 1.0) < 1e-5);
  }
}

TEST_CASE("generation is a function of the seeds") {
  SyntheticConfig cfg;
  SyntheticLanguage a(cfg), b(cfg);
  Rng ra(4), rb(4);
  CHECK(a.instance(2, 1, ra) == b.instance(2, 1, rb));
  cfg.seed = 2;
  SyntheticLanguage c(cfg);
  CHECK(c.prototype(0) != a.prototype(0));
}

TEST_CASE("isolated words and sentences") {
  SyntheticLanguage lang(SyntheticConfig{});
  Rng rng(1);
  const auto words = lang.isolated_words(3, {0, 1}, "iso", rng);
  CHECK(words.size() == 60);
  for (const auto& u : words) {
    REQUIRE(u.words.size() == 1);
    CHECK(u.words[0].start == 0);
    CHECK(u.words[0].end == u.frames.rows());
    CHECK((u.speaker_id == "spk00" || u.speaker_id == "spk01"));
  }
  validate_corpus(words);

  const auto sent = lang.sentences(10, 2, 4, {5}, "s", rng);
  CHECK(sent.size() == 10);
  std::set<std::string> ids;
  for (const auto& u : sent) {
    ids.insert(u.utterance_id);
    CHECK(u.words.size() >= 2);
    CHECK(u.words.size() <= 4);
    for (std::size_t i = 1; i < u.words.size(); ++i) CHECK(u.words[i].start >= u.words[i - 1].end);
    CHECK(u.words.back().end <= u.frames.rows());
  }
  CHECK(ids.size() == 10);
  validate_corpus(sent);
}

TEST_CASE("instances of a type are closer under DTW than other types") {
  SyntheticLanguage lang(SyntheticConfig{});
  Rng rng(3);
  int wins = 0, total = 0;
  for (std::size_t k = 0; k < 10; ++k) {
    const auto a = lang.instance(k, 0, rng);
    const auto b = lang.instance(k, 1, rng);
    const auto other = lang.instance((k + 1) % 10, 1, rng);
    wins += dtw_cost(a, b).cost < dtw_cost(a, other).cost ? 1 : 0;
    ++total;
  }
  CHECK(wins == total);
}
