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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "awekws/corpus.hpp"
#include "awekws/error.hpp"
#include "support.hpp"

using namespace awekws;
using awekws::testing::TempDir;
using awekws::testing::write_text;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an awekws::Error");
  return ErrorCode::kInvalidArgument;
}

void write_bytes(const std::filesystem::path& p, std::size_t n) {
  std::ofstream out(p, std::ios::binary);
  std::string zeros(n, '\0');
  out.write(zeros.data(), static_cast<std::streamsize>(n));
}

FeatureSequence seq(const std::string& id, const std::string& spk, FrameMatrix frames,
                    std::vector<WordAlignment> words = {}) {
  FeatureSequence s;
  s.utterance_id = id;
  s.speaker_id = spk;
  s.frames = std::move(frames);
  s.words = std::move(words);
  return s;
}

}  // namespace

TEST_CASE("a 3x2 utterance round-trips through manifest and feature file") {
  TempDir dir("corpus");
  FrameMatrix f(3, 2);
  f << 1, 2, 3, 4, 5, 6;
  write_corpus({seq("u1", "s1", f, {{"cat", 0, 2}})}, dir / "m.jsonl");
  CHECK(std::filesystem::file_size(dir.path() / "features" / "u1.f32") == 24);

  const Corpus c = load_corpus(dir / "m.jsonl");
  REQUIRE(c.size() == 1);
  CHECK(c[0].frames == f);
  CHECK(c[0].speaker_id == "s1");
  REQUIRE(c[0].words.size() == 1);
  CHECK(c[0].words[0].label == "cat");
  CHECK(c[0].words[0].end == 2);
}

TEST_CASE("feature files are little-endian float32, row-major") {
  TempDir dir("le");
  FrameMatrix f(1, 2);
  f << 1.0f, -2.0f;
  write_feature_file(dir / "x.f32", f);
  std::ifstream in(dir / "x.f32", std::ios::binary);
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000
  CHECK(b[0] == 0x00);
  CHECK(b[3] == 0x3f);
  CHECK(b[2] == 0x80);
  CHECK(b[7] == 0xc0);
}

TEST_CASE("declared shape must match the file length") {
  TempDir dir("short");
  write_bytes(dir / "a.f32", 20);
  write_text(dir / "m.jsonl", R"({"id":"a","speaker":"s","n_frames":3,"dim":2,"path":"a.f32"})" "\n");
  CHECK(code_of([&] { load_corpus(dir / "m.jsonl"); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("utterances with different dims are rejected") {
  TempDir dir("dims");
  write_bytes(dir / "a.f32", 4 * 768);
  write_bytes(dir / "b.f32", 4 * 512);
  write_text(dir / "m.jsonl", R"({"id":"a","speaker":"s","n_frames":1,"dim":768,"path":"a.f32"})"
                              "\n"
                              R"({"id":"b","speaker":"s","n_frames":1,"dim":512,"path":"b.f32"})"
                              "\n");
  CHECK(code_of([&] { load_corpus(dir / "m.jsonl"); }) == ErrorCode::kInconsistentFeatureDim);
}

TEST_CASE("loader error paths") {
  TempDir dir("errors");
  CHECK(code_of([&] { load_corpus(dir / "missing.jsonl"); }) == ErrorCode::kMissingFile);

  write_text(dir / "bad.jsonl", "{not json\n");
  CHECK(code_of([&] { load_corpus(dir / "bad.jsonl"); }) == ErrorCode::kParseError);

  write_text(dir / "nofile.jsonl", R"({"id":"a","speaker":"s","n_frames":1,"dim":1,"path":"gone.f32"})" "\n");
  CHECK(code_of([&] { load_corpus(dir / "nofile.jsonl"); }) == ErrorCode::kMissingFile);

  FrameMatrix nan(1, 1);
  nan(0, 0) = std::nanf("");
  write_feature_file(dir / "nan.f32", nan);
  write_text(dir / "nan.jsonl", R"({"id":"a","speaker":"s","n_frames":1,"dim":1,"path":"nan.f32"})" "\n");
  CHECK(code_of([&] { load_corpus(dir / "nan.jsonl"); }) == ErrorCode::kNonFiniteValue);

  write_feature_file(dir / "ok.f32", FrameMatrix::Ones(10, 1));
  write_text(dir / "align.jsonl",
             R"({"id":"a","speaker":"s","n_frames":10,"dim":1,"path":"ok.f32","words":[{"label":"x","start":8,"end":12}]})"
             "\n");
  CHECK(code_of([&] { load_corpus(dir / "align.jsonl"); }) == ErrorCode::kAlignmentOutOfRange);

  write_text(dir / "dup.jsonl", R"({"id":"a","speaker":"s","n_frames":10,"dim":1,"path":"ok.f32"})"
                                "\n"
                                R"({"id":"a","speaker":"s","n_frames":10,"dim":1,"path":"ok.f32"})"
                                "\n");
  CHECK(code_of([&] { load_corpus(dir / "dup.jsonl"); }) == ErrorCode::kParseError);
}

TEST_CASE("parallel loading gives the same corpus") {
  TempDir dir("par");
  Rng rng(3);
  Corpus c;
  for (int i = 0; i < 12; ++i) {
    c.push_back(seq("u" + std::to_string(i), "s", awekws::testing::random_matrix(5 + i, 3, rng)));
  }
  write_corpus(c, dir / "m.jsonl");
  const Corpus a = load_corpus(dir / "m.jsonl", 1);
  const Corpus b = load_corpus(dir / "m.jsonl", 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].utterance_id == c[i].utterance_id);
    CHECK(a[i].frames == b[i].frames);
  }
}

TEST_CASE("per-utterance normalization by hand") {
  FrameMatrix f(2, 2);
  f << 1, 2, 3, 4;
  const Corpus out = normalize({seq("u", "s", f)}, {NormalizationMode::kPerUtterance});
  FrameMatrix expected(2, 2);
  expected << -1, -1, 1, 1;
  CHECK((out[0].frames - expected).cwiseAbs().maxCoeff() < 1e-6f);

  const Corpus flat = normalize({seq("u", "s", FrameMatrix::Constant(2, 2, 5.0f))}, {NormalizationMode::kPerUtterance});
  CHECK(flat[0].frames.isZero(0.0f));
}

TEST_CASE("per-speaker normalization pools all frames of a speaker") {
  Rng rng(9);
  Corpus c;
  c.push_back(seq("a1", "A", (awekws::testing::random_matrix(7, 4, rng, 3.0).array() + 2.0f).matrix()));
  c.push_back(seq("b1", "B", awekws::testing::random_matrix(5, 4, rng)));
  c.push_back(seq("a2", "A", (awekws::testing::random_matrix(11, 4, rng).array() - 1.0f).matrix()));
  const Corpus out = normalize(c, {NormalizationMode::kPerSpeaker});

  // Recompute moments of the concatenated frames of each speaker.
  std::map<std::string, std::vector<const FrameMatrix*>> by_speaker;
  for (const auto& u : out) by_speaker[u.speaker_id].push_back(&u.frames);
  for (const auto& [spk, frames] : by_speaker) {
    for (Index j = 0; j < 4; ++j) {
      double sum = 0, count = 0;
      for (const auto* f : frames) {
        for (Index t = 0; t < f->rows(); ++t, ++count) sum += (*f)(t, j);
      }
      const double mean = sum / count;
      double sq = 0;
      for (const auto* f : frames) {
        for (Index t = 0; t < f->rows(); ++t) sq += ((*f)(t, j) - mean) * ((*f)(t, j) - mean);
      }
      CHECK(std::abs(mean) <= 1e-6);
      CHECK(std::abs(sq / count - 1.0) <= 1e-5);
    }
  }
  // Utterance a1 alone is not standardized: the statistics are shared.
  CHECK(std::abs(out[0].frames.cast<double>().colwise().mean()(0)) > 1e-3);
}

TEST_CASE("normalization mode names") {
  CHECK(parse_normalization_mode("per-utterance") == NormalizationMode::kPerUtterance);
  CHECK(parse_normalization_mode("per-speaker") == NormalizationMode::kPerSpeaker);
  CHECK(parse_normalization_mode("none") == NormalizationMode::kNone);
  CHECK(code_of([] { parse_normalization_mode("global"); }) == ErrorCode::kInvalidArgument);
  CHECK(to_string(NormalizationMode::kPerSpeaker) == "per-speaker");
}

TEST_CASE("extract_segments slices aligned words") {
  Rng rng(1);
  const FrameMatrix f = awekws::testing::random_matrix(10, 3, rng);
  const auto segs = extract_segments({seq("u", "s", f, {{"cat", 2, 5}})});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].label == "cat");
  CHECK(segs[0].source == "u");
  CHECK(segs[0].frames.rows() == 3);
  CHECK(segs[0].frames == f.middleRows(2, 3));

  CHECK(extract_segments({seq("u", "s", f)}).empty());
  CHECK(code_of([&] { extract_segments({seq("u", "s", f, {{"x", 8, 12}})}); }) == ErrorCode::kAlignmentOutOfRange);
}

namespace {

std::vector<WordSegment> labelled(const std::vector<std::string>& labels) {
  std::vector<WordSegment> out;
  for (const auto& l : labels) {
    WordSegment s;
    s.label = l;
    s.frames = FrameMatrix::Ones(2, 1);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("pair sampling") {
  SUBCASE("a single eligible pair comes out in both orders") {
    const auto pairs = sample_pairs(labelled({"a", "a"}), 2, 1);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == SegmentPair{0, 1});
    CHECK(pairs[1] == SegmentPair{1, 0});
  }
  SUBCASE("singleton labels never pair") {
    const auto segs = labelled({"a", "b", "a", "a"});
    const auto pairs = sample_pairs(segs, 4, 2);
    REQUIRE(pairs.size() == 4);
    for (const auto& p : pairs) {
      CHECK(segs[p.anchor].label == "a");
      CHECK(segs[p.positive].label == "a");
      CHECK(p.anchor != p.positive);
    }
  }
  SUBCASE("errors") {
    CHECK(code_of([] { sample_pairs(labelled({"a", "b"}), 2, 1); }) == ErrorCode::kNoPositivePairsAvailable);
    CHECK(code_of([] { sample_pairs(labelled({"a", "a"}), 3, 1); }) == ErrorCode::kOddPairCountRequested);
  }
  SUBCASE("deterministic under a seed") {
    const auto segs = labelled({"a", "b", "a", "b", "c", "a", "c"});
    CHECK(sample_pairs(segs, 40, 5) == sample_pairs(segs, 40, 5));
    CHECK(sample_pairs(segs, 40, 5) != sample_pairs(segs, 40, 6));
  }
  SUBCASE("every eligible unordered pair is equally likely") {
    // a: 4 members (6 pairs), b: 3 members (3 pairs) -> 9 pairs, uniform.
    const auto segs = labelled({"a", "b", "a", "b", "a", "b", "a"});
    const std::size_t draws = 90000;
    const auto pairs = sample_pairs(segs, 2 * draws, 11);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> count;
    bool mirrored = true;
    for (std::size_t k = 0; k < pairs.size(); k += 2) {
      const auto& p = pairs[k];
      mirrored = mirrored && pairs[k + 1] == SegmentPair{p.positive, p.anchor};
      ++count[{std::min(p.anchor, p.positive), std::max(p.anchor, p.positive)}];
    }
    CHECK(mirrored);
    CHECK(count.size() == 9);
    double chi2 = 0;
    const double expected = static_cast<double>(draws) / 9.0;
    for (const auto& [pair, n] : count) chi2 += (n - expected) * (n - expected) / expected;
    CHECK(chi2 < 26.1);  // 0.999 quantile of chi-square with 8 dof
  }
}
