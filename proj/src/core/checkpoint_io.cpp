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

#include "core/checkpoint_io.hpp"

#include "core/error.hpp"
#include "core/io_util.hpp"

namespace oodlab {

namespace fs = std::filesystem;
using nlohmann::json;

void write_checkpoint(const fs::path& dir, const ModelParams& params,
                      const json& meta) {
  fs::create_directories(dir);
  std::vector<const Tensor*> tensors = params.encoder.tensors();
  for (const Tensor* t : params.classifier.tensors()) tensors.push_back(t);

  BinaryWriter w;
  w.magic("MGRD");
  w.u32(static_cast<uint32_t>(tensors.size()));
  json names = json::array();
  json shapes = json::array();
  std::vector<std::string> all_names = EncoderParams::names();
  for (const std::string& n : ClassifierParams::names()) all_names.push_back(n);
  for (size_t i = 0; i < tensors.size(); ++i) {
    const Tensor& t = *tensors[i];
    w.u32(static_cast<uint32_t>(t.rank()));
    json shape = json::array();
    for (int64_t d = 0; d < t.rank(); ++d) {
      w.u32(static_cast<uint32_t>(t.dim(d)));
      shape.push_back(t.dim(d));
    }
    for (int64_t j = 0; j < t.numel(); ++j) w.f64(t[j]);
    names.push_back(all_names[i]);
    shapes.push_back(shape);
  }
  w.save(dir / "params.bin");

  json meta_out = meta;
  meta_out["names"] = names;
  meta_out["shapes"] = shapes;
  write_text_file(dir / "params.json", meta_out.dump(2) + "\n");
}

ModelParams read_checkpoint(const fs::path& dir) {
  BinaryReader r = BinaryReader::load(dir / "params.bin");
  r.expect_magic("MGRD");
  ModelParams params;
  std::vector<Tensor*> tensors = params.encoder.tensors();
  for (Tensor* t : params.classifier.tensors()) tensors.push_back(t);
  const uint32_t count = r.u32();
  require(count == tensors.size(), ErrorKind::kIo,
          "checkpoint tensor count mismatch");
  for (Tensor* t : tensors) {
    const uint32_t rank = r.u32();
    require(rank == static_cast<uint32_t>(t->rank()), ErrorKind::kIo,
            "checkpoint tensor rank mismatch");
    for (int64_t d = 0; d < t->rank(); ++d) {
      require(r.u32() == static_cast<uint32_t>(t->dim(d)), ErrorKind::kIo,
              "checkpoint tensor shape mismatch");
    }
    for (int64_t j = 0; j < t->numel(); ++j) (*t)[j] = r.f64();
  }
  require(r.exhausted(), ErrorKind::kIo, "trailing bytes in params.bin");
  return params;
}

json read_checkpoint_meta(const fs::path& dir) {
  return json::parse(read_text_file(dir / "params.json"));
}

}  // namespace oodlab
