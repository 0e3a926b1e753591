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

#ifndef GMPRUNE_ERROR_HPP_
#define GMPRUNE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmprune {

enum class ErrorCode {
  kMagicMismatch,
  kTruncatedBlob,
  kNonFiniteValue,
  kManifestParse,
  kIoFailure,
  kZeroVectorCosine,
  kCountOutOfRange,
  kNoConvergence,
  kDimensionMismatch,
  kEmptyInput,
  kGraphValidation,
  kNonSequentialGraph,
  kMaskShapeMismatch,
  kTrainerFailure,
  kShapeMismatch,
  kCacheMismatch,
  kUnknownLayer,
};

// Stable name used in diagnostics and CLI output, e.g. "MagicMismatch".
std::string_view ErrorName(ErrorCode code);

// Every failure raised by the library is an Error carrying its code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return ErrorName(code_); }

 private:
  ErrorCode code_;
};

class NonFiniteValueError : public Error {
 public:
  NonFiniteValueError(std::string layer, std::size_t flat_index);

  const std::string& layer() const noexcept { return layer_; }
  std::size_t flat_index() const noexcept { return flat_index_; }

 private:
  std::string layer_;
  std::size_t flat_index_;
};

class ZeroVectorCosineError : public Error {
 public:
  explicit ZeroVectorCosineError(std::ptrdiff_t row);

  std::ptrdiff_t row() const noexcept { return row_; }

 private:
  std::ptrdiff_t row_;
};

}  // namespace gmprune

#endif  // GMPRUNE_ERROR_HPP_
