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

#include "gmprune/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "gmprune/error.hpp"
#include "json.hpp"

namespace gmprune {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
           (v >> 24);
  }
  return v;
}

void write_f32(std::uint8_t* dst, float value) {
  std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(value));
  std::memcpy(dst, &bits, 4);
}

float read_f32(const std::uint8_t* src) {
  std::uint32_t bits;
  std::memcpy(&bits, src, 4);
  return std::bit_cast<float>(to_little_endian(bits));
}

LayerKind parse_kind(const std::string& s) {
  if (s == "conv2d") return LayerKind::kConv2d;
  if (s == "dense") return LayerKind::kDense;
  throw Error(ErrorCode::kManifestParse, "unknown layer kind '" + s + "'");
}

template <typename T>
T required(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kManifestParse,
                where + ": missing key '" + std::string(key) + "'");
  }
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw std::invalid_argument("not integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw std::invalid_argument("not a string");
    }
    return it->get<T>();
  } catch (const std::exception&) {
    throw Error(ErrorCode::kManifestParse,
                where + ": key '" + std::string(key) + "' has the wrong type");
  }
}

// Shape and metadata invariants shared by load and save.
void validate_specs(const std::vector<LayerSpec>& layers) {
  std::set<std::string> names;
  for (const auto& spec : layers) {
    const std::string where = "layer '" + spec.name + "'";
    if (spec.name.empty()) {
      throw Error(ErrorCode::kManifestParse, "layer with empty name");
    }
    if (!names.insert(spec.name).second) {
      throw Error(ErrorCode::kManifestParse, "duplicate " + where);
    }
    if (spec.out_channels <= 0 || spec.in_channels <= 0 || spec.kernel <= 0) {
      throw Error(ErrorCode::kManifestParse,
                  where + ": channel counts and kernel must be positive");
    }
    if (spec.kind == LayerKind::kDense && spec.kernel != 1) {
      throw Error(ErrorCode::kManifestParse,
                  where + ": dense layers must have kernel 1");
    }
    if (spec.blob_len != spec.expected_blob_len()) {
      throw Error(ErrorCode::kTruncatedBlob,
                  where + ": blob_len " + std::to_string(spec.blob_len) +
                      " does not match shape (expected " +
                      std::to_string(spec.expected_blob_len()) + ")");
    }
  }
  std::vector<const LayerSpec*> by_offset;
  for (const auto& spec : layers) by_offset.push_back(&spec);
  std::sort(by_offset.begin(), by_offset.end(),
            [](const LayerSpec* a, const LayerSpec* b) {
              return a->blob_offset < b->blob_offset;
            });
  for (std::size_t i = 1; i < by_offset.size(); ++i) {
    const auto* prev = by_offset[i - 1];
    if (prev->blob_len > 0 &&
        prev->blob_offset + prev->blob_len > by_offset[i]->blob_offset) {
      throw Error(ErrorCode::kManifestParse, "layers '" + prev->name +
                                                 "' and '" +
                                                 by_offset[i]->name +
                                                 "' overlap in the blob");
    }
  }
}

}  // namespace

std::string_view LayerKindName(LayerKind kind) {
  return kind == LayerKind::kDense ? "dense" : "conv2d";
}

bool operator==(const LayerSpec& a, const LayerSpec& b) {
  return a.name == b.name && a.kind == b.kind &&
         a.out_channels == b.out_channels && a.in_channels == b.in_channels &&
         a.kernel == b.kernel && a.blob_offset == b.blob_offset &&
         a.blob_len == b.blob_len;
}

bool operator==(const ModelBundle& a, const ModelBundle& b) {
  if (a.format_version != b.format_version || a.layers != b.layers ||
      a.tensors.size() != b.tensors.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    if (a.tensors[i].rows() != b.tensors[i].rows() ||
        a.tensors[i].cols() != b.tensors[i].cols() ||
        a.tensors[i] != b.tensors[i]) {
      return false;
    }
  }
  return true;
}

std::size_t ModelBundle::layer_index(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return i;
  }
  throw Error(ErrorCode::kUnknownLayer,
              "no layer named '" + std::string(name) + "'");
}

const FilterMatrixd& ModelBundle::tensor(std::string_view name) const {
  return tensors[layer_index(name)];
}

FilterMatrixd& ModelBundle::tensor(std::string_view name) {
  return tensors[layer_index(name)];
}

void ModelBundle::add_layer(std::string name, LayerKind kind,
                            std::int64_t in_channels, std::int64_t kernel,
                            FilterMatrixd weights) {
  LayerSpec spec;
  spec.name = std::move(name);
  spec.kind = kind;
  spec.out_channels = weights.rows();
  spec.in_channels = in_channels;
  spec.kernel = kernel;
  spec.blob_offset = 0;
  for (const auto& l : layers) {
    spec.blob_offset = std::max(spec.blob_offset, l.blob_offset + l.blob_len);
  }
  spec.blob_len = spec.expected_blob_len();
  layers.push_back(std::move(spec));
  tensors.push_back(std::move(weights));
}

void ModelBundle::repack() {
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].out_channels = tensors[i].rows();
    layers[i].blob_offset = offset;
    layers[i].blob_len = layers[i].expected_blob_len();
    offset += layers[i].blob_len;
  }
}

void validate_bundle(const ModelBundle& bundle) {
  if (bundle.format_version != kBundleFormatVersion) {
    throw Error(ErrorCode::kManifestParse,
                "unsupported format_version " +
                    std::to_string(bundle.format_version));
  }
  if (bundle.layers.size() != bundle.tensors.size()) {
    throw Error(ErrorCode::kManifestParse, "layer/tensor count mismatch");
  }
  validate_specs(bundle.layers);
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    const auto& spec = bundle.layers[i];
    const auto& t = bundle.tensors[i];
    if (t.rows() != spec.out_channels || t.cols() != spec.filter_size()) {
      throw Error(ErrorCode::kManifestParse,
                  "layer '" + spec.name + "': tensor shape " +
                      std::to_string(t.rows()) + "x" +
                      std::to_string(t.cols()) + " does not match spec");
    }
    for (Index k = 0; k < t.size(); ++k) {
      const double v = t.data()[k];
      if (!std::isfinite(v) || !std::isfinite(static_cast<float>(v))) {
        throw NonFiniteValueError(spec.name, static_cast<std::size_t>(k));
      }
    }
  }
}

std::vector<std::uint8_t> encode_bundle(const ModelBundle& bundle) {
  validate_bundle(bundle);

  ordered_json manifest;
  manifest["format_version"] = bundle.format_version;
  manifest["layers"] = ordered_json::array();
  std::uint64_t blob_size = 0;
  for (const auto& spec : bundle.layers) {
    ordered_json l;
    l["name"] = spec.name;
    l["kind"] = std::string(LayerKindName(spec.kind));
    l["out_channels"] = spec.out_channels;
    l["in_channels"] = spec.in_channels;
    l["kernel"] = spec.kernel;
    l["blob_offset"] = spec.blob_offset;
    l["blob_len"] = spec.blob_len;
    manifest["layers"].push_back(std::move(l));
    blob_size = std::max(blob_size, spec.blob_offset + spec.blob_len);
  }
  const std::string text = manifest.dump();

  std::vector<std::uint8_t> out;
  out.reserve(kBundleMagic.size() + text.size() + 1 + blob_size);
  out.insert(out.end(), kBundleMagic.begin(), kBundleMagic.end());
  out.insert(out.end(), text.begin(), text.end());
  out.push_back(0);
  const std::size_t blob_start = out.size();
  out.resize(blob_start + blob_size, 0);
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    std::uint8_t* dst = out.data() + blob_start + bundle.layers[i].blob_offset;
    const auto& t = bundle.tensors[i];
    for (Index k = 0; k < t.size(); ++k) {
      write_f32(dst + 4 * k, static_cast<float>(t.data()[k]));
    }
  }
  return out;
}

ModelBundle decode_bundle(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kBundleMagic.size() ||
      !std::equal(kBundleMagic.begin(), kBundleMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kMagicMismatch, "file does not start with GMPK1");
  }
  const auto manifest_begin = bytes.begin() + kBundleMagic.size();
  const auto separator = std::find(manifest_begin, bytes.end(), 0);
  if (separator == bytes.end()) {
    throw Error(ErrorCode::kManifestParse,
                "manifest is not terminated by a NUL separator");
  }

  ordered_json manifest;
  try {
    manifest = ordered_json::parse(manifest_begin, separator);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestParse, e.what());
  }
  if (!manifest.is_object()) {
    throw Error(ErrorCode::kManifestParse, "manifest is not a JSON object");
  }

  ModelBundle bundle;
  bundle.format_version = required<int>(manifest, "format_version", "manifest");
  if (bundle.format_version != kBundleFormatVersion) {
    throw Error(ErrorCode::kManifestParse,
                "unsupported format_version " +
                    std::to_string(bundle.format_version));
  }
  auto layers_it = manifest.find("layers");
  if (layers_it == manifest.end() || !layers_it->is_array()) {
    throw Error(ErrorCode::kManifestParse, "manifest: 'layers' must be an array");
  }
  for (std::size_t i = 0; i < layers_it->size(); ++i) {
    const auto& l = (*layers_it)[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (!l.is_object()) {
      throw Error(ErrorCode::kManifestParse, where + " is not an object");
    }
    LayerSpec spec;
    spec.name = required<std::string>(l, "name", where);
    spec.kind = parse_kind(required<std::string>(l, "kind", where));
    spec.out_channels = required<std::int64_t>(l, "out_channels", where);
    spec.in_channels = required<std::int64_t>(l, "in_channels", where);
    spec.kernel = required<std::int64_t>(l, "kernel", where);
    const auto offset = required<std::int64_t>(l, "blob_offset", where);
    const auto len = required<std::int64_t>(l, "blob_len", where);
    if (offset < 0 || len < 0) {
      throw Error(ErrorCode::kManifestParse,
                  where + ": negative blob offset or length");
    }
    spec.blob_offset = static_cast<std::uint64_t>(offset);
    spec.blob_len = static_cast<std::uint64_t>(len);
    bundle.layers.push_back(std::move(spec));
  }
  validate_specs(bundle.layers);

  const std::uint8_t* blob = bytes.data() + (separator - bytes.begin()) + 1;
  const std::uint64_t blob_size =
      static_cast<std::uint64_t>(bytes.end() - separator - 1);
  for (const auto& spec : bundle.layers) {
    if (spec.blob_offset + spec.blob_len > blob_size) {
      throw Error(ErrorCode::kTruncatedBlob,
                  "layer '" + spec.name + "' needs bytes [" +
                      std::to_string(spec.blob_offset) + ", " +
                      std::to_string(spec.blob_offset + spec.blob_len) +
                      ") but the blob holds " + std::to_string(blob_size));
    }
    FilterMatrixd t(spec.out_channels, spec.filter_size());
    const std::uint8_t* src = blob + spec.blob_offset;
    for (Index k = 0; k < t.size(); ++k) {
      const float v = read_f32(src + 4 * k);
      if (!std::isfinite(v)) {
        throw NonFiniteValueError(spec.name, static_cast<std::size_t>(k));
      }
      t.data()[k] = v;
    }
    bundle.tensors.push_back(std::move(t));
  }
  return bundle;
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorCode::kIoFailure, "read failed on '" + path.string() + "'");
  }
  return decode_bundle(bytes);
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = encode_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open '" + path.string() + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "write failed on '" + path.string() + "'");
  }
}

}  // namespace gmprune
