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

#ifndef OODLAB_CORE_JSONCFG_HPP_
#define OODLAB_CORE_JSONCFG_HPP_

// JSON bindings for the config structs shared by dataset manifests,
// checkpoints, and scenario configs.

#include <json.hpp>

#include "core/synthgen.hpp"
#include "core/trainer.hpp"

namespace oodlab {

void to_json(nlohmann::json& j, const GeometryConfig& g);
void from_json(const nlohmann::json& j, GeometryConfig& g);

void to_json(nlohmann::json& j, const TransformConfig& t);
void from_json(const nlohmann::json& j, TransformConfig& t);

void to_json(nlohmann::json& j, const DistributionSpec& s);
void from_json(const nlohmann::json& j, DistributionSpec& s);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace oodlab

#endif  // OODLAB_CORE_JSONCFG_HPP_
