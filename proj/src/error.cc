// Copyright 2026 The amilkit Authors.
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

#include "amilkit/error.h"

namespace amilkit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
      return "parse_error";
    case ErrorCode::kDanglingEndpoint:
      return "dangling_endpoint";
    case ErrorCode::kMissingType:
      return "missing_type";
    case ErrorCode::kMissingSurfaceForm:
      return "missing_surface_form";
    case ErrorCode::kUnknownEntity:
      return "unknown_entity";
    case ErrorCode::kAmbiguousSurfaceForm:
      return "ambiguous_surface_form";
    case ErrorCode::kInsufficientCandidates:
      return "insufficient_candidates";
    case ErrorCode::kMarkerTruncated:
      return "marker_truncated";
    case ErrorCode::kDegenerateSplits:
      return "degenerate_splits";
    case ErrorCode::kInvalidSpan:
      return "invalid_span";
    case ErrorCode::kInvalidArch:
      return "invalid_arch";
    case ErrorCode::kDivergence:
      return "divergence";
    case ErrorCode::kMissingMetadata:
      return "missing_metadata";
    case ErrorCode::kEmptyGold:
      return "empty_gold";
    case ErrorCode::kInvalidConfig:
      return "invalid_config";
    case ErrorCode::kIo:
      return "io_error";
    case ErrorCode::kUsage:
      return "usage_error";
  }
  return "unknown";
}

}  // namespace amilkit
