/* Copyright 2026 The gmprune Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "gmprune/error.hpp"

namespace gmprune {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMagicMismatch: return "MagicMismatch";
    case ErrorCode::kTruncatedBlob: return "TruncatedBlob";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kManifestParse: return "ManifestParse";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kZeroVectorCosine: return "ZeroVectorCosine";
    case ErrorCode::kCountOutOfRange: return "CountOutOfRange";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kGraphValidation: return "GraphValidation";
    case ErrorCode::kNonSequentialGraph: return "NonSequentialGraph";
    case ErrorCode::kMaskShapeMismatch: return "MaskShapeMismatch";
    case ErrorCode::kTrainerFailure: return "TrainerFailure";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kCacheMismatch: return "CacheMismatch";
    case ErrorCode::kUnknownLayer: return "UnknownLayer";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorName(code)) + ": " + message),
      code_(code) {}

NonFiniteValueError::NonFiniteValueError(std::string layer,
                                         std::size_t flat_index)
    : Error(ErrorCode::kNonFiniteValue,
            "layer '" + layer + "' flat index " + std::to_string(flat_index)),
      layer_(std::move(layer)),
      flat_index_(flat_index) {}

ZeroVectorCosineError::ZeroVectorCosineError(std::ptrdiff_t row)
    : Error(ErrorCode::kZeroVectorCosine,
            "row " + std::to_string(row) +
                " is the zero vector; cosine distance is undefined"),
      row_(row) {}

}  // namespace gmprune
