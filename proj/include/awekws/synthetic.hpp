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
#include <string>
#include <vector>

#include "awekws/corpus.hpp"
#include "awekws/rng.hpp"

namespace awekws {

// A toy "language" of word types for testing the full pipeline without audio.
// Each type is a smooth random trajectory with zero mean over time, so the
// frame average carries little identity and order matters. Instances are
// time-stretched, nonlinearly warped, noisy and coloured by a speaker.
struct SyntheticConfig {
  std::size_t n_types = 20;
  Index dim = 16;
  Index min_len = 20;  // prototype length range, frames
  Index max_len = 60;
  std::size_t n_speakers = 12;
  Index smoothing = 5;  // moving-average width applied to the prototypes
  double noise = 0.35;
  double stretch_min = 0.8;
  double stretch_max = 1.2;
  double warp = 0.4;  // amplitude of the monotone warp, below 1
  double speaker_offset = 0.5;
  double speaker_gain = 0.2;
  std::uint64_t seed = 1;
};

class SyntheticLanguage {
 public:
  explicit SyntheticLanguage(const SyntheticConfig& config);

  const SyntheticConfig& config() const { return config_; }
  std::string label(std::size_t type) const;
  std::string speaker(std::size_t index) const;
  const FrameMatrix& prototype(std::size_t type) const { return prototypes_[type]; }

  FrameMatrix instance(std::size_t type, std::size_t speaker, Rng& rng) const;

  // One word per utterance, `per_type` of each type, speakers taken in turn
  // from `speakers`.
  Corpus isolated_words(std::size_t per_type, const std::vector<std::size_t>& speakers, const std::string& prefix,
                        Rng& rng) const;

  // Utterances of min_words..max_words uniformly drawn words, with alignments.
  Corpus sentences(std::size_t count, std::size_t min_words, std::size_t max_words,
                   const std::vector<std::size_t>& speakers, const std::string& prefix, Rng& rng) const;

 private:
  struct Speaker {
    Vector<float> offset;
    float gain = 1.0f;
  };

  SyntheticConfig config_;
  std::vector<FrameMatrix> prototypes_;
  std::vector<Speaker> speakers_;
};

}  // namespace awekws
