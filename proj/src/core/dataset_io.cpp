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

#include "core/dataset_io.hpp"

#include <json.hpp>

#include "core/error.hpp"
#include "core/figures.hpp"
#include "core/io_util.hpp"
#include "core/jsoncfg.hpp"

namespace oodlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DatasetRole role_from_string(const std::string& s) {
  if (s == "train") return DatasetRole::kTrain;
  if (s == "val") return DatasetRole::kVal;
  if (s == "test") return DatasetRole::kTest;
  fail(ErrorKind::kIo, "unknown dataset role '" + s + "'");
}

}  // namespace

void write_dataset(const fs::path& dir, const Dataset& ds, bool with_pgm) {
  fs::create_directories(dir);

  json manifest{{"format_version", kDatasetFormatVersion},
                {"kind", "oodlab-dataset"},
                {"spec", ds.spec},
                {"n", ds.samples.size()},
                {"seed", ds.seed},
                {"role", to_string(ds.role)},
                {"geometry", ds.geometry},
                {"transform", ds.transform},
                {"labels", {{"0", "benign"}, {"1", "malignant"}}},
                {"mask_bit_order", "lsb-first"}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  const int64_t px = static_cast<int64_t>(ds.spec.image_size) *
                     ds.spec.image_size;
  BinaryWriter w;
  w.magic("OODL");
  w.u32(static_cast<uint32_t>(ds.samples.size()));
  for (const LabeledImage& s : ds.samples) {
    require(static_cast<int64_t>(s.pixels.size()) == px, ErrorKind::kInternal,
            "sample pixel count does not match manifest image size");
    w.u32(s.sample_seed);
    w.u8(static_cast<uint8_t>(s.label));
    for (float p : s.pixels) w.f32(p);
    // mask bits, LSB-first within each byte
    uint8_t acc = 0;
    int nbits = 0;
    for (int64_t i = 0; i < px; ++i) {
      if (s.mask[static_cast<size_t>(i)]) acc |= static_cast<uint8_t>(1u << nbits);
      if (++nbits == 8) {
        w.u8(acc);
        acc = 0;
        nbits = 0;
      }
    }
    if (nbits > 0) w.u8(acc);
  }
  w.save(dir / "samples.bin");

  if (with_pgm) {
    fs::create_directories(dir / "pgm");
    for (size_t i = 0; i < ds.samples.size(); ++i) {
      const LabeledImage& s = ds.samples[i];
      char name[64];
      std::snprintf(name, sizeof(name), "%04zu-%s.pgm", i,
                    to_string(s.label));
      write_pgm(dir / "pgm" / name, s.pixels, ds.spec.image_size, "");
    }
  }
}

Dataset read_dataset(const fs::path& dir) {
  const json manifest = json::parse(read_text_file(dir / "manifest.json"));
  require(manifest.value("kind", "") == "oodlab-dataset", ErrorKind::kIo,
          "not a dataset directory: " + dir.string());
  require(manifest.value("format_version", 0) == kDatasetFormatVersion,
          ErrorKind::kIo, "unsupported dataset format version");
  Dataset ds;
  ds.spec = manifest.at("spec").get<DistributionSpec>();
  ds.seed = manifest.at("seed").get<uint64_t>();
  ds.role = role_from_string(manifest.at("role").get<std::string>());
  ds.geometry = manifest.value("geometry", GeometryConfig{});
  ds.transform = manifest.value("transform", TransformConfig{});

  const int64_t px = static_cast<int64_t>(ds.spec.image_size) *
                     ds.spec.image_size;
  const int64_t mask_bytes = (px + 7) / 8;
  BinaryReader r = BinaryReader::load(dir / "samples.bin");
  r.expect_magic("OODL");
  const uint32_t count = r.u32();
  require(count == manifest.at("n").get<uint32_t>(), ErrorKind::kIo,
          "sample count mismatch between manifest and samples.bin");
  ds.samples.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    LabeledImage& s = ds.samples[i];
    s.image_size = ds.spec.image_size;
    s.sample_seed = r.u32();
    const uint8_t label = r.u8();
    require(label <= 1, ErrorKind::kIo, "invalid label byte");
    s.label = static_cast<ShapeClass>(label);
    s.pixels.resize(static_cast<size_t>(px));
    for (int64_t j = 0; j < px; ++j) s.pixels[static_cast<size_t>(j)] = r.f32();
    s.mask.assign(static_cast<size_t>(px), 0);
    for (int64_t b = 0; b < mask_bytes; ++b) {
      const uint8_t byte = r.u8();
      for (int bit = 0; bit < 8; ++bit) {
        const int64_t idx = b * 8 + bit;
        if (idx < px) s.mask[static_cast<size_t>(idx)] = (byte >> bit) & 1u;
      }
    }
  }
  require(r.exhausted(), ErrorKind::kIo, "trailing bytes in samples.bin");
  return ds;
}

}  // namespace oodlab
