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

#include "awekws/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "awekws/error.hpp"

namespace awekws {

SyntheticLanguage::SyntheticLanguage(const SyntheticConfig& config) : config_(config) {
  require(config.n_types >= 1 && config.n_speakers >= 1, ErrorCode::kInvalidArgument,
          "synthetic language needs word types and speakers");
  require(config.dim >= 1 && config.min_len >= 2 && config.max_len >= config.min_len, ErrorCode::kInvalidArgument,
          "bad synthetic prototype shape");
  require(std::abs(config.warp) < 1.0, ErrorCode::kInvalidArgument, "warp amplitude must be below 1");
  Rng rng(config.seed);
  const Index d = config.dim;
  for (std::size_t k = 0; k < config.n_types; ++k) {
    const Index len = config.min_len + static_cast<Index>(rng.index(static_cast<std::uint64_t>(
                                           config.max_len - config.min_len + 1)));
    const Index pad = config.smoothing;
    Matrix<double> raw(len + pad, d);
    for (Index i = 0; i < raw.size(); ++i) raw.data()[i] = rng.normal();
    Matrix<double> p(len, d);
    for (Index t = 0; t < len; ++t) p.row(t) = raw.middleRows(t, pad + 1).colwise().mean();
    p.rowwise() -= p.colwise().mean();
    const double scale = std::sqrt(p.squaredNorm() / static_cast<double>(p.size()));
    prototypes_.push_back((p / scale).cast<float>());
  }
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    Speaker sp;
    sp.offset.resize(d);
    for (Index j = 0; j < d; ++j) sp.offset[j] = static_cast<float>(config.speaker_offset * rng.normal());
    sp.gain = static_cast<float>(1.0 + config.speaker_gain * rng.uniform(-1.0, 1.0));
    speakers_.push_back(std::move(sp));
  }
}

std::string SyntheticLanguage::label(std::size_t type) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w%02zu", type);
  return buf;
}

std::string SyntheticLanguage::speaker(std::size_t index) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%02zu", index);
  return buf;
}

FrameMatrix SyntheticLanguage::instance(std::size_t type, std::size_t speaker, Rng& rng) const {
  require(type < prototypes_.size() && speaker < speakers_.size(), ErrorCode::kInvalidArgument,
          "unknown synthetic type or speaker");
  const FrameMatrix& proto = prototypes_[type];
  const Index src_len = proto.rows();
  const double stretch = rng.uniform(config_.stretch_min, config_.stretch_max);
  const Index len = std::max<Index>(2, static_cast<Index>(std::lround(stretch * static_cast<double>(src_len))));
  const double a = config_.warp * rng.uniform(-1.0, 1.0);
  const double phase = rng.uniform(0.0, 1.0) < 0.5 ? 1.0 : 2.0;
  const Speaker& sp = speakers_[speaker];

  FrameMatrix x(len, proto.cols());
  for (Index t = 0; t < len; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(len - 1);
    // u + a sin(k pi u) / (k pi) is monotone for |a| < 1 and fixes both ends.
    const double w = u + a * std::sin(phase * std::numbers::pi * u) / (phase * std::numbers::pi);
    const double pos = w * static_cast<double>(src_len - 1);
    const Index lo = std::min<Index>(static_cast<Index>(pos), src_len - 2);
    const double frac = pos - static_cast<double>(lo);
    for (Index j = 0; j < x.cols(); ++j) {
      const double clean = (1.0 - frac) * proto(lo, j) + frac * proto(lo + 1, j);
      x(t, j) = static_cast<float>(sp.gain * (clean + config_.noise * rng.normal()) + sp.offset[j]);
    }
  }
  return x;
}

Corpus SyntheticLanguage::isolated_words(std::size_t per_type, const std::vector<std::size_t>& speakers,
                                         const std::string& prefix, Rng& rng) const {
  require(!speakers.empty(), ErrorCode::kInvalidArgument, "no speakers given");
  Corpus corpus;
  std::size_t n = 0;
  for (std::size_t k = 0; k < prototypes_.size(); ++k) {
    for (std::size_t i = 0; i < per_type; ++i, ++n) {
      FeatureSequence u;
      const std::size_t s = speakers[n % speakers.size()];
      char id[64];
      std::snprintf(id, sizeof(id), "%s%05zu", prefix.c_str(), n);
      u.utterance_id = id;
      u.speaker_id = speaker(s);
      u.frames = instance(k, s, rng);
      u.words.push_back({label(k), 0, u.frames.rows()});
      corpus.push_back(std::move(u));
    }
  }
  return corpus;
}

Corpus SyntheticLanguage::sentences(std::size_t count, std::size_t min_words, std::size_t max_words,
                                    const std::vector<std::size_t>& speakers, const std::string& prefix,
                                    Rng& rng) const {
  require(!speakers.empty(), ErrorCode::kInvalidArgument, "no speakers given");
  require(min_words >= 1 && max_words >= min_words, ErrorCode::kInvalidArgument, "bad word count range");
  Corpus corpus;
  for (std::size_t n = 0; n < count; ++n) {
    FeatureSequence u;
    const std::size_t s = speakers[n % speakers.size()];
    char id[64];
    std::snprintf(id, sizeof(id), "%s%05zu", prefix.c_str(), n);
    u.utterance_id = id;
    u.speaker_id = speaker(s);
    const std::size_t words = min_words + static_cast<std::size_t>(rng.index(max_words - min_words + 1));
    std::vector<FrameMatrix> parts;
    Index total = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const auto k = static_cast<std::size_t>(rng.index(prototypes_.size()));
      parts.push_back(instance(k, s, rng));
      u.words.push_back({label(k), total, total + parts.back().rows()});
      total += parts.back().rows();
    }
    u.frames.resize(total, config_.dim);
    Index at = 0;
    for (const auto& p : parts) {
      u.frames.middleRows(at, p.rows()) = p;
      at += p.rows();
    }
    corpus.push_back(std::move(u));
  }
  return corpus;
}

}  // namespace awekws
