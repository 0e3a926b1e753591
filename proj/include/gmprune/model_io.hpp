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

#ifndef GMPRUNE_MODEL_IO_HPP_
#define GMPRUNE_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gmprune/types.hpp"

namespace gmprune {

// Container layout ("GMPK1"):
//   "GMPK1\n" | UTF-8 JSON manifest | '\0' | little-endian float32 blob
// Blob offsets in the manifest are relative to the first blob byte. Each
// tensor is stored row-major over (out_channel, in_channel, ky, kx).
inline constexpr std::string_view kBundleMagic = "GMPK1\n";
inline constexpr int kBundleFormatVersion = 1;

enum class LayerKind { kConv2d, kDense };

std::string_view LayerKindName(LayerKind kind);

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kConv2d;
  std::int64_t out_channels = 0;
  std::int64_t in_channels = 0;
  std::int64_t kernel = 1;
  std::uint64_t blob_offset = 0;
  std::uint64_t blob_len = 0;

  // Length of one flattened filter: in_channels * kernel^2.
  std::int64_t filter_size() const { return in_channels * kernel * kernel; }
  std::uint64_t expected_blob_len() const {
    return static_cast<std::uint64_t>(out_channels * filter_size()) * 4u;
  }
};

// Weights are held in double precision in memory and narrowed to float32 on
// save. Anything loaded from disk is therefore float-representable, which is
// what makes load(save(b)) element-exact.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::vector<LayerSpec> layers;
  std::vector<FilterMatrixd> tensors;

  // Throws UnknownLayer.
  std::size_t layer_index(std::string_view name) const;
  const FilterMatrixd& tensor(std::string_view name) const;
  FilterMatrixd& tensor(std::string_view name);

  // Appends a layer, filling blob_offset/blob_len contiguously.
  void add_layer(std::string name, LayerKind kind, std::int64_t in_channels,
                 std::int64_t kernel, FilterMatrixd weights);

  // Recomputes blob offsets as a contiguous packing in layer order.
  void repack();
};

bool operator==(const LayerSpec& a, const LayerSpec& b);
bool operator==(const ModelBundle& a, const ModelBundle& b);

// Checks every bundle invariant: unique names, dense => kernel 1, shapes
// matching their spec, positive channel counts, finite values.
// Throws ManifestParse, TruncatedBlob or NonFiniteValue.
void validate_bundle(const ModelBundle& bundle);

std::vector<std::uint8_t> encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(const std::vector<std::uint8_t>& bytes);

// Throws MagicMismatch, TruncatedBlob, NonFiniteValue, ManifestParse or
// IoFailure.
ModelBundle load_bundle(const std::filesystem::path& path);

// Validates first; nothing is written when the bundle is invalid.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);

}  // namespace gmprune

#endif  // GMPRUNE_MODEL_IO_HPP_
