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

#ifndef OODLAB_CORE_DATASET_IO_HPP_
#define OODLAB_CORE_DATASET_IO_HPP_

// Dataset export: one directory per dataset with `manifest.json` and
// `samples.bin` ("OODL" magic, u32 count, then per sample: u32 seed,
// u8 label, image_size^2 float32 pixels, image_size^2 packed mask bits,
// LSB-first). Optional per-sample PGM dumps for inspection.

#include <filesystem>

#include "core/synthgen.hpp"

namespace oodlab {

constexpr int kDatasetFormatVersion = 1;

void write_dataset(const std::filesystem::path& dir, const Dataset& ds,
                   bool with_pgm = false);

Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace oodlab

#endif  // OODLAB_CORE_DATASET_IO_HPP_
