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

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

#include "awekws/corpus.hpp"
#include "awekws/embedders.hpp"

namespace awekws {

struct WindowConfig {
  Index min_len = 10;
  Index max_len = 65;
  Index len_step = 5;
  Index stride = 5;

  void validate() const;
};

struct Window {
  Index start = 0;
  Index length = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

// Lengths min_len, min_len + len_step, ... up to max_len (and at most T),
// starts 0, stride, ... while the window fits; length-major order. An
// utterance shorter than min_len yields the single window (0, T).
std::vector<Window> generate_windows(Index num_frames, const WindowConfig& config);

struct KeywordTemplateSet {
  std::string keyword;
  std::vector<FrameMatrix> templates;
};

// Groups the word segments of a template corpus by label, in order of first appearance.
std::vector<KeywordTemplateSet> templates_from_segments(const std::vector<WordSegment>& segments);

struct Detection {
  std::string keyword;
  std::string utterance_id;
  double score = 0.0;  // max cosine similarity, or 1 - DTW cost
  Window best_window;
  std::size_t best_template = 0;
};

struct RankedDetections {
  std::string keyword;
  std::vector<Detection> detections;  // descending score, ties by utterance id
};

struct SearchOptions {
  int threads = 1;
};

// Instrumentation: how many embeddings a search computed.
struct SearchStats {
  std::atomic<std::size_t> window_embeddings{0};
  std::atomic<std::size_t> template_embeddings{0};
};

// Best (template, window) cosine similarity of one keyword in one utterance.
// Ties keep the lowest template index, then the earliest window.
Detection score_keyword(const KeywordTemplateSet& keyword, const FeatureSequence& utterance,
                        const Embedder& embedder, const WindowConfig& config);

// Scores every keyword against every utterance. Window embeddings are computed
// once per utterance and shared by all keywords; utterances are processed in
// parallel when options.threads > 1.
std::vector<RankedDetections> search(const std::vector<KeywordTemplateSet>& keywords, const Corpus& corpus,
                                     const Embedder& embedder, const WindowConfig& config,
                                     const SearchOptions& options = {}, SearchStats* stats = nullptr);

// Serial reference: literal loops over keyword, utterance, template and window,
// recomputing every embedding. Used to check search().
std::vector<RankedDetections> search_reference(const std::vector<KeywordTemplateSet>& keywords,
                                               const Corpus& corpus, const Embedder& embedder,
                                               const WindowConfig& config);

// DTW baseline: score = 1 - subsequence DTW cost, max over templates.
std::vector<RankedDetections> dtw_search_all(const std::vector<KeywordTemplateSet>& keywords, const Corpus& corpus,
                                             const SearchOptions& options = {});
std::vector<RankedDetections> dtw_search_all_reference(const std::vector<KeywordTemplateSet>& keywords,
                                                       const Corpus& corpus);

// Sorts detections by descending score with utterance-id tiebreak.
void rank(RankedDetections& ranked);

// One JSON object per line: keyword, utterance_id, score, window_start,
// window_len, template_index.
void write_detections(const std::vector<RankedDetections>& rankings, std::ostream& out);
std::vector<RankedDetections> read_detections(std::istream& in);

}  // namespace awekws
