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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "awekws/tensor.hpp"

namespace awekws {

struct WordAlignment {
  std::string label;
  Index start = 0;  // first frame
  Index end = 0;    // one past the last frame
};

struct FeatureSequence {
  std::string utterance_id;
  std::string speaker_id;
  FrameMatrix frames;           // T x D
  double sample_period = 0.02;  // seconds per frame; metadata only
  std::vector<WordAlignment> words;

  Index num_frames() const { return frames.rows(); }
  Index dim() const { return frames.cols(); }
};

using Corpus = std::vector<FeatureSequence>;

struct WordSegment {
  std::string source;  // utterance id
  std::string label;
  Index start_frame = 0;
  Index end_frame = 0;
  FrameMatrix frames;
};

struct ManifestEntry {
  std::string id;
  std::string speaker;
  Index n_frames = 0;
  Index dim = 0;
  std::string path;  // relative to the manifest's directory
  std::vector<WordAlignment> words;
};

enum class NormalizationMode { kNone, kPerUtterance, kPerSpeaker };

struct NormalizationScope {
  NormalizationMode mode = NormalizationMode::kPerUtterance;
  double epsilon = 1e-8;  // variance floor
};

NormalizationMode parse_normalization_mode(const std::string& name);
std::string to_string(NormalizationMode mode);

// Manifest: one JSON object per line with fields id, speaker, n_frames, dim,
// path and optionally words = [{label, start, end}, ...].
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::vector<ManifestEntry>& entries, std::ostream& out);

// Feature files are headerless little-endian float32, row-major.
FrameMatrix read_feature_file(const std::filesystem::path& path, Index n_frames, Index dim);
void write_feature_file(const std::filesystem::path& path, const FrameMatrix& frames);

// Loads every utterance in manifest order. `threads` > 1 reads files in parallel.
Corpus load_corpus(const std::filesystem::path& manifest_path, int threads = 1);

// Writes one feature file per utterance under `<manifest dir>/<feature_subdir>/`
// and the manifest itself.
void write_corpus(const Corpus& corpus, const std::filesystem::path& manifest_path,
                  const std::string& feature_subdir = "features");

// Checks the corpus-level invariants (non-empty sequences, constant D, finite values,
// unique ids, alignments in range). Throws on the first violation.
void validate_corpus(const Corpus& corpus);

// Mean/variance normalization per utterance or per speaker (population
// variance, floored at scope.epsilon). Returns a new corpus.
Corpus normalize(const Corpus& corpus, const NormalizationScope& scope);

std::vector<WordSegment> extract_segments(const Corpus& corpus);

struct SegmentPair {
  std::size_t anchor = 0;    // index into the segment list
  std::size_t positive = 0;  // index into the segment list

  friend bool operator==(const SegmentPair&, const SegmentPair&) = default;
};

// Draws n_pairs / 2 unordered same-label pairs uniformly (with replacement
// across draws) and emits each in both orders: (a, b), (b, a).
std::vector<SegmentPair> sample_pairs(const std::vector<WordSegment>& segments, std::size_t n_pairs,
                                      std::uint64_t seed);

}  // namespace awekws
