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

#include "awekws/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "awekws/error.hpp"
#include "awekws/rng.hpp"

namespace awekws {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

WordAlignment parse_word(const json& j, const std::string& utt) {
  WordAlignment w;
  try {
    w.label = j.at("label").get<std::string>();
    w.start = j.at("start").get<Index>();
    w.end = j.at("end").get<Index>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, "bad word alignment in utterance '" + utt + "': " + e.what());
  }
  return w;
}

void check_alignment(const WordAlignment& w, Index n_frames, const std::string& utt) {
  if (w.start < 0 || w.start >= w.end || w.end > n_frames) {
    fail(ErrorCode::kAlignmentOutOfRange, "alignment ('" + w.label + "', " + std::to_string(w.start) + ", " +
                                              std::to_string(w.end) + ") outside utterance '" + utt + "' of " +
                                              std::to_string(n_frames) + " frames");
  }
}

}  // namespace

NormalizationMode parse_normalization_mode(const std::string& name) {
  if (name == "per-utterance") return NormalizationMode::kPerUtterance;
  if (name == "per-speaker") return NormalizationMode::kPerSpeaker;
  if (name == "none") return NormalizationMode::kNone;
  fail(ErrorCode::kInvalidArgument, "unknown normalization mode '" + name + "'");
}

std::string to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::kPerUtterance:
      return "per-utterance";
    case NormalizationMode::kPerSpeaker:
      return "per-speaker";
    case NormalizationMode::kNone:
      return "none";
  }
  return "none";
}

std::vector<ManifestEntry> read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open manifest " + manifest_path.string());

  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ManifestEntry e;
    try {
      const json j = json::parse(line);
      e.id = j.at("id").get<std::string>();
      e.speaker = j.at("speaker").get<std::string>();
      e.n_frames = j.at("n_frames").get<Index>();
      e.dim = j.at("dim").get<Index>();
      e.path = j.at("path").get<std::string>();
      if (j.contains("words")) {
        for (const auto& w : j.at("words")) e.words.push_back(parse_word(w, e.id));
      }
    } catch (const json::exception& ex) {
      fail(ErrorCode::kParseError, manifest_path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    if (e.n_frames < 1 || e.dim < 1) {
      fail(ErrorCode::kParseError, manifest_path.string() + ":" + std::to_string(line_no) +
                                       ": n_frames and dim must be positive");
    }
    if (!seen.insert(e.id).second) {
      fail(ErrorCode::kParseError, "duplicate utterance id '" + e.id + "' in " + manifest_path.string());
    }
    for (const auto& w : e.words) check_alignment(w, e.n_frames, e.id);
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries, std::ostream& out) {
  for (const auto& e : entries) {
    json j = {{"id", e.id}, {"speaker", e.speaker}, {"n_frames", e.n_frames}, {"dim", e.dim}, {"path", e.path}};
    if (!e.words.empty()) {
      json words = json::array();
      for (const auto& w : e.words) words.push_back({{"label", w.label}, {"start", w.start}, {"end", w.end}});
      j["words"] = std::move(words);
    }
    out << j.dump() << '\n';
  }
}

FrameMatrix read_feature_file(const fs::path& path, Index n_frames, Index dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open feature file " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uintmax_t>(in.tellg());
  const auto expected = static_cast<std::uintmax_t>(4) * n_frames * dim;
  if (bytes != expected) {
    fail(ErrorCode::kDimensionMismatch, path.string() + " has " + std::to_string(bytes) + " bytes, expected " +
                                            std::to_string(expected) + " for " + std::to_string(n_frames) +
                                            "x" + std::to_string(dim) + " float32");
  }
  in.seekg(0);
  FrameMatrix frames(n_frames, dim);
  in.read(reinterpret_cast<char*>(frames.data()), static_cast<std::streamsize>(expected));
  if (!in) fail(ErrorCode::kMissingFile, "short read from " + path.string());
  if constexpr (std::endian::native == std::endian::big) {
    auto* words = reinterpret_cast<std::uint32_t*>(frames.data());
    for (Index i = 0; i < frames.size(); ++i) words[i] = byteswap32(words[i]);
  }
  return frames;
}

void write_feature_file(const fs::path& path, const FrameMatrix& frames) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kMissingFile, "cannot create feature file " + path.string());
  if constexpr (std::endian::native == std::endian::big) {
    std::vector<std::uint32_t> buf(static_cast<std::size_t>(frames.size()));
    std::memcpy(buf.data(), frames.data(), buf.size() * 4);
    for (auto& w : buf) w = byteswap32(w);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  } else {
    out.write(reinterpret_cast<const char*>(frames.data()), static_cast<std::streamsize>(frames.size() * 4));
  }
  if (!out) fail(ErrorCode::kMissingFile, "failed writing " + path.string());
}

Corpus load_corpus(const fs::path& manifest_path, int threads) {
  const auto entries = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  Corpus corpus(entries.size());
  std::vector<std::string> errors(entries.size());
  std::vector<ErrorCode> codes(entries.size(), ErrorCode::kInvalidArgument);
  const auto n = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& e = entries[static_cast<std::size_t>(i)];
    auto& seq = corpus[static_cast<std::size_t>(i)];
    try {
      seq.utterance_id = e.id;
      seq.speaker_id = e.speaker;
      seq.words = e.words;
      seq.frames = read_feature_file(base / e.path, e.n_frames, e.dim);
    } catch (const Error& err) {
      errors[static_cast<std::size_t>(i)] = err.what();
      codes[static_cast<std::size_t>(i)] = err.code();
    }
  }
  // Report the first failure in manifest order so errors are deterministic.
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw Error(codes[i], errors[i]);
  }
  validate_corpus(corpus);
  return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& manifest_path, const std::string& feature_subdir) {
  const fs::path base = manifest_path.parent_path();
  fs::create_directories(base / feature_subdir);
  std::vector<ManifestEntry> entries;
  entries.reserve(corpus.size());
  for (const auto& seq : corpus) {
    ManifestEntry e;
    e.id = seq.utterance_id;
    e.speaker = seq.speaker_id;
    e.n_frames = seq.num_frames();
    e.dim = seq.dim();
    e.path = (fs::path(feature_subdir) / (seq.utterance_id + ".f32")).generic_string();
    e.words = seq.words;
    write_feature_file(base / e.path, seq.frames);
    entries.push_back(std::move(e));
  }
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) fail(ErrorCode::kMissingFile, "cannot create manifest " + manifest_path.string());
  write_manifest(entries, out);
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  Index dim = -1;
  for (const auto& seq : corpus) {
    if (seq.num_frames() < 1 || seq.dim() < 1) {
      fail(ErrorCode::kEmptySequence, "utterance '" + seq.utterance_id + "' has no frames");
    }
    if (!ids.insert(seq.utterance_id).second) {
      fail(ErrorCode::kParseError, "duplicate utterance id '" + seq.utterance_id + "'");
    }
    if (dim < 0) dim = seq.dim();
    if (seq.dim() != dim) {
      fail(ErrorCode::kInconsistentFeatureDim, "utterance '" + seq.utterance_id + "' has dim " +
                                                   std::to_string(seq.dim()) + ", corpus dim is " +
                                                   std::to_string(dim));
    }
    if (!seq.frames.allFinite()) {
      fail(ErrorCode::kNonFiniteValue, "utterance '" + seq.utterance_id + "' contains non-finite values");
    }
    for (const auto& w : seq.words) check_alignment(w, seq.num_frames(), seq.utterance_id);
  }
}

Corpus normalize(const Corpus& corpus, const NormalizationScope& scope) {
  require(scope.epsilon > 0.0, ErrorCode::kInvalidArgument, "normalization epsilon must be positive");
  Corpus out = corpus;
  if (scope.mode == NormalizationMode::kNone || corpus.empty()) return out;

  // Group utterance indices by scope key, in first-appearance order.
  std::vector<std::vector<std::size_t>> groups;
  if (scope.mode == NormalizationMode::kPerUtterance) {
    for (std::size_t i = 0; i < corpus.size(); ++i) groups.push_back({i});
  } else {
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& spk = corpus[i].speaker_id;
      require(!spk.empty(), ErrorCode::kInvalidArgument,
              "per-speaker normalization needs a speaker id for '" + corpus[i].utterance_id + "'");
      auto [it, inserted] = slot.try_emplace(spk, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  }

  for (const auto& group : groups) {
    const Index dim = corpus[group.front()].dim();
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(dim);
    Index count = 0;
    for (auto i : group) {
      sum += corpus[i].frames.cast<double>().colwise().sum().transpose().array();
      count += corpus[i].num_frames();
    }
    if (count == 0) {
      fail(ErrorCode::kEmptyScopeGroup, "normalization group of '" + corpus[group.front()].speaker_id +
                                            "' has no frames");
    }
    const Eigen::ArrayXd mean = sum / static_cast<double>(count);
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(dim);
    for (auto i : group) {
      const Eigen::ArrayXXd centered =
          corpus[i].frames.cast<double>().array().rowwise() - mean.transpose();
      sq += centered.square().colwise().sum().transpose();
    }
    const Eigen::ArrayXd inv_std = (sq / static_cast<double>(count)).max(scope.epsilon).rsqrt();
    for (auto i : group) {
      const Eigen::ArrayXXd x = corpus[i].frames.cast<double>().array();
      out[i].frames = ((x.rowwise() - mean.transpose()).rowwise() * inv_std.transpose()).cast<float>().matrix();
    }
  }
  return out;
}

std::vector<WordSegment> extract_segments(const Corpus& corpus) {
  std::vector<WordSegment> segments;
  for (const auto& seq : corpus) {
    for (const auto& w : seq.words) {
      check_alignment(w, seq.num_frames(), seq.utterance_id);
      WordSegment s;
      s.source = seq.utterance_id;
      s.label = w.label;
      s.start_frame = w.start;
      s.end_frame = w.end;
      s.frames = seq.frames.middleRows(w.start, w.end - w.start);
      segments.push_back(std::move(s));
    }
  }
  return segments;
}

std::vector<SegmentPair> sample_pairs(const std::vector<WordSegment>& segments, std::size_t n_pairs,
                                      std::uint64_t seed) {
  if (n_pairs % 2 != 0) {
    fail(ErrorCode::kOddPairCountRequested,
         "pairs are emitted in both orders, so n_pairs must be even (got " + std::to_string(n_pairs) + ")");
  }
  // Labels in sorted order so the eligible-pair enumeration does not depend on
  // hash iteration order.
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < segments.size(); ++i) by_label[segments[i].label].push_back(i);

  struct Group {
    const std::vector<std::size_t>* members;
    std::uint64_t first;  // cumulative offset of this group's unordered pairs
  };
  std::vector<Group> groups;
  std::uint64_t total = 0;
  for (const auto& [label, members] : by_label) {
    const std::uint64_t m = members.size();
    if (label.empty() || m < 2) continue;
    groups.push_back({&members, total});
    total += m * (m - 1) / 2;
  }
  if (total == 0) fail(ErrorCode::kNoPositivePairsAvailable, "no word type has two or more segments");

  Rng rng(seed);
  std::vector<SegmentPair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs / 2; ++k) {
    const std::uint64_t r = rng.index(total);
    const auto it = std::prev(std::upper_bound(groups.begin(), groups.end(), r,
                                               [](std::uint64_t v, const Group& g) { return v < g.first; }));
    // Unrank r - first into (a, b) with a < b over the group's members.
    std::uint64_t rank = r - it->first;
    const auto& members = *it->members;
    std::uint64_t a = 0;
    std::uint64_t row = members.size() - 1;
    while (rank >= row) {
      rank -= row;
      ++a;
      --row;
    }
    const std::uint64_t b = a + 1 + rank;
    pairs.push_back({members[a], members[b]});
    pairs.push_back({members[b], members[a]});
  }
  return pairs;
}

}  // namespace awekws
