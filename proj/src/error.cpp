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

#include "awekws/error.hpp"

namespace awekws {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInconsistentFeatureDim: return "InconsistentFeatureDim";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kEmptyScopeGroup: return "EmptyScopeGroup";
    case ErrorCode::kAlignmentOutOfRange: return "AlignmentOutOfRange";
    case ErrorCode::kNoPositivePairsAvailable: return "NoPositivePairsAvailable";
    case ErrorCode::kOddPairCountRequested: return "OddPairCountRequested";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kInvalidLength: return "InvalidLength";
    case ErrorCode::kZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNoSameLabelPairs: return "NoSameLabelPairs";
    case ErrorCode::kZeroNormFrame: return "ZeroNormFrame";
    case ErrorCode::kNoRelevantUtterances: return "NoRelevantUtterances";
    case ErrorCode::kNoKeywordsSurviveFilter: return "NoKeywordsSurviveFilter";
    case ErrorCode::kLayerSetInconsistent: return "LayerSetInconsistent";
    case ErrorCode::kCheckpointFormat: return "CheckpointFormat";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace awekws
