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

#include <stdexcept>
#include <string>
#include <string_view>

namespace awekws {

enum class ErrorCode {
  kMissingFile,
  kParseError,
  kDimensionMismatch,       // feature file byte length disagrees with manifest
  kInconsistentFeatureDim,  // feature dim varies within a corpus
  kNonFiniteValue,
  kEmptyScopeGroup,
  kAlignmentOutOfRange,
  kNoPositivePairsAvailable,
  kOddPairCountRequested,
  kShapeMismatch,
  kNonFiniteGradient,
  kEmptySequence,
  kDimMismatch,  // sequence dim disagrees with an embedder or another sequence
  kInvalidLength,
  kZeroNormEmbedding,
  kNonFiniteLoss,
  kNoSameLabelPairs,
  kZeroNormFrame,
  kNoRelevantUtterances,
  kNoKeywordsSurviveFilter,
  kLayerSetInconsistent,
  kCheckpointFormat,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace awekws
