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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "gmprune/error.hpp"
#include "gmprune/fixtures.hpp"
#include "gmprune/model_io.hpp"

namespace fs = std::filesystem;
using namespace gmprune;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gmprune_model_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::uint8_t> raw_file(const std::string& manifest,
                                   const std::vector<float>& values) {
  std::vector<std::uint8_t> bytes(kBundleMagic.begin(), kBundleMagic.end());
  bytes.insert(bytes.end(), manifest.begin(), manifest.end());
  bytes.push_back(0);
  for (float v : values) {
    std::uint8_t b[4];
    std::memcpy(b, &v, 4);  // test host is little-endian
    bytes.insert(bytes.end(), b, b + 4);
  }
  return bytes;
}

std::string one_layer_manifest(int blob_len) {
  return R"({"format_version":1,"layers":[{"name":"c","kind":"conv2d",)"
         R"("out_channels":2,"in_channels":3,"kernel":1,"blob_offset":0,"blob_len":)" +
         std::to_string(blob_len) + "}]}";
}

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_bundle(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return ErrorCode::kIoFailure;
}

ModelBundle random_shaped_bundle(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 6);
  std::normal_distribution<float> normal(0.0f, 2.0f);
  ModelBundle b;
  const int layers = std::uniform_int_distribution<int>(0, 4)(rng);
  for (int l = 0; l < layers; ++l) {
    const bool dense = rng() % 3 == 0;
    const int out = dim(rng), in = dim(rng), k = dense ? 1 : dim(rng) % 3 + 1;
    FilterMatrixd w(out, in * k * k);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
    b.add_layer("layer" + std::to_string(l),
                dense ? LayerKind::kDense : LayerKind::kConv2d, in, k, w);
  }
  return b;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("hand-written single conv layer loads as a 2x3 filter matrix") {
  const auto bundle =
      decode_bundle(raw_file(one_layer_manifest(24), {1, 2, 3, 4, 5, 6}));
  REQUIRE(bundle.layers.size() == 1);
  CHECK(bundle.layers[0].name == "c");
  CHECK(bundle.layers[0].kind == LayerKind::kConv2d);
  const auto& t = bundle.tensors[0];
  REQUIRE(t.rows() == 2);
  REQUIRE(t.cols() == 3);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 2) == 3.0);
  CHECK(t(1, 0) == 4.0);
}

TEST_CASE("blob_len disagreeing with the shape is TruncatedBlob") {
  CHECK(decode_error(raw_file(one_layer_manifest(20), {1, 2, 3, 4, 5})) ==
        ErrorCode::kTruncatedBlob);
}

TEST_CASE("blob shorter than the manifest claims is TruncatedBlob") {
  CHECK(decode_error(raw_file(one_layer_manifest(24), {1, 2, 3, 4, 5})) ==
        ErrorCode::kTruncatedBlob);
}

TEST_CASE("wrong magic is MagicMismatch") {
  auto bytes = raw_file(one_layer_manifest(24), {1, 2, 3, 4, 5, 6});
  bytes[4] = '2';
  CHECK(decode_error(bytes) == ErrorCode::kMagicMismatch);
  CHECK(decode_error({}) == ErrorCode::kMagicMismatch);
}

TEST_CASE("malformed manifests are ManifestParse") {
  CHECK(decode_error(raw_file("{not json", {})) == ErrorCode::kManifestParse);
  CHECK(decode_error(raw_file(R"({"layers":[]})", {})) ==
        ErrorCode::kManifestParse);
  CHECK(decode_error(raw_file(R"({"format_version":1,"layers":[{"name":"a"}]})",
                              {})) == ErrorCode::kManifestParse);
  CHECK(decode_error(raw_file(
            R"({"format_version":1,"layers":[{"name":"a","kind":"dense","out_channels":1,)"
            R"("in_channels":1,"kernel":3,"blob_offset":0,"blob_len":36}]})",
            std::vector<float>(9, 0.f))) == ErrorCode::kManifestParse);
  CHECK(decode_error(raw_file(
            R"({"format_version":1,"layers":[{"name":"a","kind":"pool","out_channels":1,)"
            R"("in_channels":1,"kernel":1,"blob_offset":0,"blob_len":4}]})",
            {0.f})) == ErrorCode::kManifestParse);
  const std::string dup =
      R"({"format_version":1,"layers":[)"
      R"({"name":"a","kind":"dense","out_channels":1,"in_channels":1,"kernel":1,"blob_offset":0,"blob_len":4},)"
      R"({"name":"a","kind":"dense","out_channels":1,"in_channels":1,"kernel":1,"blob_offset":4,"blob_len":4}]})";
  CHECK(decode_error(raw_file(dup, {0.f, 0.f})) == ErrorCode::kManifestParse);

  auto no_separator = raw_file(one_layer_manifest(24), {});
  no_separator.pop_back();
  CHECK(decode_error(no_separator) == ErrorCode::kManifestParse);
}

TEST_CASE("non-finite values report layer and flat index") {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  try {
    decode_bundle(raw_file(one_layer_manifest(24), {1, 2, 3, 4, nan, 6}));
    FAIL("expected NonFiniteValue");
  } catch (const NonFiniteValueError& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteValue);
    CHECK(e.layer() == "c");
    CHECK(e.flat_index() == 4);
  }
  const float inf = std::numeric_limits<float>::infinity();
  CHECK(decode_error(raw_file(one_layer_manifest(24), {inf, 2, 3, 4, 5, 6})) ==
        ErrorCode::kNonFiniteValue);
}

TEST_CASE("empty bundle saves as manifest plus empty blob") {
  const auto bytes = encode_bundle(ModelBundle{});
  const std::string expected =
      std::string(kBundleMagic) + R"({"format_version":1,"layers":[]})";
  REQUIRE(bytes.size() == expected.size() + 1);
  CHECK(std::equal(expected.begin(), expected.end(), bytes.begin()));
  CHECK(bytes.back() == 0);
  CHECK(decode_bundle(bytes) == ModelBundle{});
}

TEST_CASE("manifest keys follow the LayerSpec field order") {
  const auto bytes = encode_bundle(fixtures::collinear_bundle());
  const std::string text(bytes.begin() + kBundleMagic.size(),
                         std::find(bytes.begin(), bytes.end(), 0));
  CHECK(text ==
        R"({"format_version":1,"layers":[{"name":"collinear","kind":"conv2d",)"
        R"("out_channels":3,"in_channels":1,"kernel":1,"blob_offset":0,"blob_len":12}]})");
}

TEST_CASE("saving a NaN is refused before any byte is written") {
  ModelBundle b = fixtures::random_bundle(3);
  b.tensors[1](2, 5) = std::nan("");
  const fs::path path = scratch("nan.gmpk");
  fs::remove(path);
  try {
    save_bundle(b, path);
    FAIL("expected NonFiniteValue");
  } catch (const NonFiniteValueError& e) {
    CHECK(e.layer() == "conv2");
    CHECK(e.flat_index() == 2 * 72 + 5);
  }
  CHECK_FALSE(fs::exists(path));
}

TEST_CASE("values outside float range are refused") {
  ModelBundle b = fixtures::collinear_bundle();
  b.tensors[0](0, 0) = 1e300;
  CHECK_THROWS_AS(encode_bundle(b), NonFiniteValueError);
}

TEST_CASE("random 3-layer bundle round-trips to identical bytes") {
  const ModelBundle b = fixtures::random_bundle(11);
  const fs::path path = scratch("random.gmpk");
  save_bundle(b, path);
  const ModelBundle loaded = load_bundle(path);
  CHECK(loaded == b);
  CHECK(encode_bundle(loaded) == encode_bundle(b));

  std::ifstream in(path, std::ios::binary);
  const std::vector<std::uint8_t> on_disk((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
  CHECK(on_disk == encode_bundle(b));
}

TEST_CASE("round-trip identity holds for randomly shaped bundles") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelBundle b = random_shaped_bundle(rng);
    const auto bytes = encode_bundle(b);
    const ModelBundle back = decode_bundle(bytes);
    REQUIRE(back == b);
    REQUIRE(encode_bundle(back) == bytes);
  }
}

TEST_CASE("every truncation of a valid file is rejected with a typed error") {
  const auto bytes = encode_bundle(fixtures::random_bundle(5));
  for (std::size_t cut = 0; cut < bytes.size(); cut += 7) {
    std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + cut);
    CHECK_THROWS_AS(decode_bundle(prefix), Error);
  }
}

TEST_CASE("missing files are IoFailure") {
  try {
    load_bundle(scratch("does-not-exist.gmpk"));
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoFailure);
  }
}

TEST_CASE("unknown layers are reported by name") {
  const ModelBundle b = fixtures::random_bundle(1);
  CHECK(b.layer_index("conv2") == 1);
  CHECK_THROWS_AS(b.tensor("nope"), Error);
}

}  // TEST_SUITE
