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

#ifndef OODLAB_CORE_CHECKPOINT_IO_HPP_
#define OODLAB_CORE_CHECKPOINT_IO_HPP_

// Parameter checkpoints: `params.bin` ("MGRD" magic, u32 tensor count, per
// tensor u32 rank + u32 dims + float64 payload) and `params.json` metadata.

#include <filesystem>

#include <json.hpp>

#include "core/nnmodels.hpp"

namespace oodlab {

void write_checkpoint(const std::filesystem::path& dir,
                      const ModelParams& params, const nlohmann::json& meta);

ModelParams read_checkpoint(const std::filesystem::path& dir);

nlohmann::json read_checkpoint_meta(const std::filesystem::path& dir);

}  // namespace oodlab

#endif  // OODLAB_CORE_CHECKPOINT_IO_HPP_
