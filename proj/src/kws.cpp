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

#include "awekws/kws.hpp"

#include <algorithm>
#include <exception>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "awekws/dtw.hpp"
#include "awekws/error.hpp"

namespace awekws {
namespace {

// Rows scaled to unit length; an all-zero embedding stays zero and so has
// similarity 0 with everything.
Matrix<double> unit_rows(std::vector<Vector<float>> const& rows) {
  const Index dim = rows.empty() ? 0 : rows.front().size();
  Matrix<double> out(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vector<double> v = rows[i].cast<double>();
    const double n = v.norm();
    if (n > 0.0) v /= n;
    out.row(static_cast<Index>(i)) = v.transpose();
  }
  return out;
}

struct Best {
  double score = -2.0;
  std::size_t templ = 0;
  std::size_t window = 0;
};

// Max over (template, window), template-major; strict > keeps the first maximum.
Best best_match(const Matrix<double>& templates, const Matrix<double>& windows) {
  const Matrix<double> sims = templates * windows.transpose();
  Best best;
  for (Index t = 0; t < sims.rows(); ++t) {
    for (Index w = 0; w < sims.cols(); ++w) {
      if (sims(t, w) > best.score) best = {sims(t, w), static_cast<std::size_t>(t), static_cast<std::size_t>(w)};
    }
  }
  return best;
}

void check_dims(const std::vector<KeywordTemplateSet>& keywords, const Corpus& corpus, const Embedder* embedder) {
  Index dim = -1;
  auto check = [&](Index d, const std::string& what) {
    if (dim < 0) dim = d;
    if (d != dim) {
      fail(ErrorCode::kDimMismatch, what + " has dim " + std::to_string(d) + ", expected " + std::to_string(dim));
    }
  };
  if (embedder != nullptr && embedder->input_dim() > 0) dim = embedder->input_dim();
  for (const auto& k : keywords) {
    require(!k.templates.empty(), ErrorCode::kInvalidArgument, "keyword '" + k.keyword + "' has no templates");
    for (const auto& t : k.templates) {
      if (t.rows() < 1) fail(ErrorCode::kEmptySequence, "template of '" + k.keyword + "' has no frames");
      check(t.cols(), "template of '" + k.keyword + "'");
    }
  }
  for (const auto& u : corpus) {
    if (u.num_frames() < 1) fail(ErrorCode::kEmptySequence, "utterance '" + u.utterance_id + "' has no frames");
    check(u.dim(), "utterance '" + u.utterance_id + "'");
  }
}

std::vector<RankedDetections> assemble(const std::vector<KeywordTemplateSet>& keywords,
                                       std::vector<std::vector<Detection>>&& table) {
  std::vector<RankedDetections> out(keywords.size());
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    out[k].keyword = keywords[k].keyword;
    out[k].detections = std::move(table[k]);
    rank(out[k]);
  }
  return out;
}

// Runs body(u) for every utterance index, in parallel when threads > 1, and
// rethrows the first failure in utterance order.
template <typename Body>
void for_each_utterance(std::size_t n, int threads, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t u = 0; u < count; ++u) {
    try {
      body(static_cast<std::size_t>(u));
    } catch (...) {
      errors[static_cast<std::size_t>(u)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void WindowConfig::validate() const {
  require(min_len >= 1 && min_len <= max_len, ErrorCode::kInvalidArgument,
          "window lengths need 1 <= min_len <= max_len");
  require(stride >= 1 && len_step >= 1, ErrorCode::kInvalidArgument, "window stride and length step must be >= 1");
}

std::vector<Window> generate_windows(Index num_frames, const WindowConfig& config) {
  config.validate();
  require(num_frames >= 1, ErrorCode::kEmptySequence, "cannot window an empty utterance");
  if (num_frames < config.min_len) return {{0, num_frames}};
  std::vector<Window> windows;
  for (Index len = config.min_len; len <= std::min(config.max_len, num_frames); len += config.len_step) {
    for (Index start = 0; start + len <= num_frames; start += config.stride) windows.push_back({start, len});
  }
  return windows;
}

std::vector<KeywordTemplateSet> templates_from_segments(const std::vector<WordSegment>& segments) {
  std::vector<KeywordTemplateSet> sets;
  std::map<std::string, std::size_t> slot;
  for (const auto& s : segments) {
    auto [it, inserted] = slot.try_emplace(s.label, sets.size());
    if (inserted) sets.push_back({s.label, {}});
    sets[it->second].templates.push_back(s.frames);
  }
  return sets;
}

Detection score_keyword(const KeywordTemplateSet& keyword, const FeatureSequence& utterance,
                        const Embedder& embedder, const WindowConfig& config) {
  check_dims({keyword}, Corpus{}, &embedder);
  if (utterance.num_frames() < 1) fail(ErrorCode::kEmptySequence, "utterance '" + utterance.utterance_id + "' is empty");
  if (utterance.dim() != keyword.templates.front().cols()) {
    fail(ErrorCode::kDimMismatch, "utterance '" + utterance.utterance_id + "' dim differs from the templates");
  }
  const auto windows = generate_windows(utterance.num_frames(), config);
  std::vector<Vector<float>> t_emb, w_emb;
  for (const auto& t : keyword.templates) t_emb.push_back(embedder.embed(t));
  for (const auto& w : windows) w_emb.push_back(embedder.embed(utterance.frames.middleRows(w.start, w.length)));
  const Best b = best_match(unit_rows(t_emb), unit_rows(w_emb));
  return {keyword.keyword, utterance.utterance_id, b.score, windows[b.window], b.templ};
}

std::vector<RankedDetections> search(const std::vector<KeywordTemplateSet>& keywords, const Corpus& corpus,
                                     const Embedder& embedder, const WindowConfig& config,
                                     const SearchOptions& options, SearchStats* stats) {
  config.validate();
  check_dims(keywords, corpus, &embedder);

  std::vector<Matrix<double>> templates(keywords.size());
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    std::vector<Vector<float>> emb;
    for (const auto& t : keywords[k].templates) emb.push_back(embedder.embed(t));
    templates[k] = unit_rows(emb);
    if (stats != nullptr) stats->template_embeddings += emb.size();
  }

  std::vector<std::vector<Detection>> table(keywords.size(), std::vector<Detection>(corpus.size()));
  for_each_utterance(corpus.size(), options.threads, [&](std::size_t u) {
    const auto& utt = corpus[u];
    const auto windows = generate_windows(utt.num_frames(), config);
    std::vector<Vector<float>> emb;
    emb.reserve(windows.size());
    for (const auto& w : windows) emb.push_back(embedder.embed(utt.frames.middleRows(w.start, w.length)));
    if (stats != nullptr) stats->window_embeddings += emb.size();
    const Matrix<double> unit = unit_rows(emb);
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      const Best b = best_match(templates[k], unit);
      table[k][u] = {keywords[k].keyword, utt.utterance_id, b.score, windows[b.window], b.templ};
    }
  });
  return assemble(keywords, std::move(table));
}

std::vector<RankedDetections> search_reference(const std::vector<KeywordTemplateSet>& keywords,
                                               const Corpus& corpus, const Embedder& embedder,
                                               const WindowConfig& config) {
  config.validate();
  check_dims(keywords, corpus, &embedder);
  auto cosine = [](const Vector<float>& a, const Vector<float>& b) {
    const Vector<double> x = a.cast<double>(), y = b.cast<double>();
    const double nx = x.norm(), ny = y.norm();
    return nx > 0.0 && ny > 0.0 ? x.dot(y) / (nx * ny) : 0.0;
  };
  std::vector<std::vector<Detection>> table(keywords.size());
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    for (const auto& utt : corpus) {
      Detection best{keywords[k].keyword, utt.utterance_id, -2.0, {}, 0};
      const auto windows = generate_windows(utt.num_frames(), config);
      for (std::size_t t = 0; t < keywords[k].templates.size(); ++t) {
        for (const auto& w : windows) {
          const double s = cosine(embedder.embed(keywords[k].templates[t]),
                                  embedder.embed(utt.frames.middleRows(w.start, w.length)));
          if (s > best.score) {
            best.score = s;
            best.best_window = w;
            best.best_template = t;
          }
        }
      }
      table[k].push_back(std::move(best));
    }
  }
  return assemble(keywords, std::move(table));
}

std::vector<RankedDetections> dtw_search_all(const std::vector<KeywordTemplateSet>& keywords, const Corpus& corpus,
                                             const SearchOptions& options) {
  check_dims(keywords, corpus, nullptr);
  std::vector<std::vector<Detection>> table(keywords.size(), std::vector<Detection>(corpus.size()));
  for_each_utterance(corpus.size(), options.threads, [&](std::size_t u) {
    const auto& utt = corpus[u];
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      Detection best{keywords[k].keyword, utt.utterance_id, -1.0, {}, 0};
      for (std::size_t t = 0; t < keywords[k].templates.size(); ++t) {
        const DtwResult r = dtw_search(keywords[k].templates[t], utt.frames);
        if (1.0 - r.cost > best.score) {
          best.score = 1.0 - r.cost;
          best.best_window = {r.region_start, r.region_end - r.region_start};
          best.best_template = t;
        }
      }
      table[k][u] = std::move(best);
    }
  });
  return assemble(keywords, std::move(table));
}

std::vector<RankedDetections> dtw_search_all_reference(const std::vector<KeywordTemplateSet>& keywords,
                                                       const Corpus& corpus) {
  check_dims(keywords, corpus, nullptr);
  std::vector<std::vector<Detection>> table(keywords.size());
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    for (const auto& utt : corpus) {
      Detection best{keywords[k].keyword, utt.utterance_id, -1.0, {}, 0};
      for (std::size_t t = 0; t < keywords[k].templates.size(); ++t) {
        const DtwResult r = dtw_search(keywords[k].templates[t], utt.frames);
        if (1.0 - r.cost > best.score) {
          best.score = 1.0 - r.cost;
          best.best_window = {r.region_start, r.region_end - r.region_start};
          best.best_template = t;
        }
      }
      table[k].push_back(std::move(best));
    }
  }
  return assemble(keywords, std::move(table));
}

void rank(RankedDetections& ranked) {
  std::stable_sort(ranked.detections.begin(), ranked.detections.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.utterance_id < b.utterance_id;
  });
}

void write_detections(const std::vector<RankedDetections>& rankings, std::ostream& out) {
  for (const auto& r : rankings) {
    for (const auto& d : r.detections) {
      const nlohmann::json j = {{"keyword", d.keyword},
                                {"utterance_id", d.utterance_id},
                                {"score", d.score},
                                {"window_start", d.best_window.start},
                                {"window_len", d.best_window.length},
                                {"template_index", d.best_template}};
      out << j.dump() << '\n';
    }
  }
}

std::vector<RankedDetections> read_detections(std::istream& in) {
  std::vector<RankedDetections> out;
  std::map<std::string, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Detection d;
    try {
      const auto j = nlohmann::json::parse(line);
      d.keyword = j.at("keyword").get<std::string>();
      d.utterance_id = j.at("utterance_id").get<std::string>();
      d.score = j.at("score").get<double>();
      d.best_window = {j.at("window_start").get<Index>(), j.at("window_len").get<Index>()};
      d.best_template = j.at("template_index").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, "detections line " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = slot.try_emplace(d.keyword, out.size());
    if (inserted) out.push_back({d.keyword, {}});
    out[it->second].detections.push_back(std::move(d));
  }
  for (auto& r : out) rank(r);
  return out;
}

}  // namespace awekws
