// Copyright 2026 The OODLab Authors.
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/checkpoint_io.hpp"
#include "core/dataset_io.hpp"
#include "core/error.hpp"
#include "core/figures.hpp"
#include "core/io_util.hpp"
#include "core/rng.hpp"

using namespace oodlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("oodlab-test-") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("dataset export/import round trip is exact") {
  DistributionSpec spec;
  spec.i_mal = 170;
  spec.i_ben = 130;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    const Dataset ds = generate_dataset(spec, 8, seed, DatasetRole::kTest);
    const fs::path dir = temp_dir("dataset");
    write_dataset(dir, ds, /*with_pgm=*/false);
    const Dataset back = read_dataset(dir);
    CHECK(back.spec.i_mal == 170);
    CHECK(back.spec.i_ben == 130);
    CHECK(back.seed == seed);
    CHECK(back.role == DatasetRole::kTest);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i) {
      CHECK(back.samples[i].pixels == ds.samples[i].pixels);
      CHECK(back.samples[i].mask == ds.samples[i].mask);
      CHECK(back.samples[i].label == ds.samples[i].label);
      CHECK(back.samples[i].sample_seed == ds.samples[i].sample_seed);
    }
  }
}

TEST_CASE("samples.bin layout matches the documented format") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 2, 5, DatasetRole::kTrain);
  const fs::path dir = temp_dir("layout");
  write_dataset(dir, ds);

  std::ifstream in(dir / "samples.bin", std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "OODL");
  uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  CHECK(count == 2);
  const size_t px = 64 * 64;
  const size_t per_sample = 4 + 1 + px * 4 + px / 8;
  in.seekg(0, std::ios::end);
  CHECK(static_cast<size_t>(in.tellg()) == 8 + 2 * per_sample);
}

TEST_CASE("dataset export can emit inspection PGMs") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 2, 6, DatasetRole::kTrain);
  const fs::path dir = temp_dir("pgm");
  write_dataset(dir, ds, /*with_pgm=*/true);
  CHECK(fs::exists(dir / "pgm" / "0000-benign.pgm"));
  CHECK(fs::exists(dir / "pgm" / "0001-malignant.pgm"));
  const PgmImage img = read_pgm(dir / "pgm" / "0000-benign.pgm");
  CHECK(img.width == 64);
  CHECK(img.height == 64);
}

TEST_CASE("corrupted dataset files are rejected") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 2, 7, DatasetRole::kTrain);
  const fs::path dir = temp_dir("corrupt");
  write_dataset(dir, ds);
  // truncate samples.bin
  fs::resize_file(dir / "samples.bin", 10);
  CHECK_THROWS_AS(read_dataset(dir), Error);
}

TEST_CASE("checkpoint round trip preserves every parameter bit") {
  ModelParams params{EncoderParams::init(11), ClassifierParams::init(12)};
  Rng rng(13);
  for (int64_t i = 0; i < params.classifier.fc_w.numel(); ++i) {
    params.classifier.fc_w[i] = rng.uniform(-1, 1);
  }
  params.classifier.fc_b[0] = rng.uniform(-1, 1);
  const fs::path dir = temp_dir("ckpt");
  nlohmann::json meta{{"pipeline", "ce"}, {"seed", 11}, {"epoch", 42},
                      {"config_hash", "abc123"}};
  write_checkpoint(dir, params, meta);
  const ModelParams back = read_checkpoint(dir);
  auto all = [](const ModelParams& m) {
    std::vector<const Tensor*> ts = m.encoder.tensors();
    for (const Tensor* t : m.classifier.tensors()) ts.push_back(t);
    return ts;
  };
  const auto a = all(params), b = all(back);
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i]->shape() == b[i]->shape());
    for (int64_t j = 0; j < a[i]->numel(); ++j) {
      CHECK((*a[i])[j] == (*b[i])[j]);
    }
  }
  const nlohmann::json meta_back = read_checkpoint_meta(dir);
  CHECK(meta_back.at("epoch") == 42);
  CHECK(meta_back.at("config_hash") == "abc123");
  CHECK(meta_back.at("names").size() == 10);

  // params.bin starts with the MGRD magic
  std::ifstream in(dir / "params.bin", std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "MGRD");
}

TEST_CASE("pgm round trip and map rendering") {
  const fs::path dir = temp_dir("pgmrt");
  std::vector<double> values(16 * 16);
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(i) / (values.size() - 1);
  }
  write_pgm(dir / "map.pgm", values, 16, "deadbeef");
  const PgmImage img = read_pgm(dir / "map.pgm");
  CHECK(img.width == 16);
  CHECK(img.height == 16);
  CHECK(img.gray[0] == 0);
  CHECK(img.gray[255] == 255);
  // the config hash comment must be embedded
  const std::string content = read_text_file(dir / "map.pgm");
  CHECK(content.find("# config_hash=deadbeef") != std::string::npos);
}

TEST_CASE("png encoder emits a wellformed grayscale stream") {
  std::vector<uint8_t> gray(8 * 4);
  for (size_t i = 0; i < gray.size(); ++i) gray[i] = static_cast<uint8_t>(i * 8);
  const std::vector<uint8_t> png = encode_png_gray(gray, 8, 4);
  REQUIRE(png.size() > 20);
  const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  for (int i = 0; i < 8; ++i) CHECK(png[static_cast<size_t>(i)] == sig[i]);
  // IHDR dimensions, big-endian
  CHECK(png[16 + 3] == 8);  // width
  CHECK(png[20 + 3] == 4);  // height
}

TEST_CASE("base64 known vectors") {
  CHECK(base64_encode({'M', 'a', 'n'}) == "TWFu");
  CHECK(base64_encode({'M', 'a'}) == "TWE=");
  CHECK(base64_encode({'M'}) == "TQ==");
  CHECK(base64_encode({}) == "");
}

TEST_CASE("fixed-format float rendering") {
  CHECK(fmt_double(0.5, 6) == "0.500000");
  CHECK(fmt_double(std::numeric_limits<double>::quiet_NaN(), 6) == "nan");
  CHECK(fmt_double(-1.25, 2) == "-1.25");
}

TEST_CASE("binary reader catches truncation and bad magic") {
  BinaryWriter w;
  w.magic("OODL");
  w.u32(7);
  BinaryReader r(w.bytes());
  CHECK_THROWS_AS(r.expect_magic("MGRD"), Error);
  BinaryReader r2(w.bytes());
  r2.expect_magic("OODL");
  CHECK(r2.u32() == 7);
  CHECK_THROWS_AS(r2.u32(), Error);
}
