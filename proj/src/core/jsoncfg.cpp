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

#include "core/jsoncfg.hpp"

namespace oodlab {

using nlohmann::json;

void to_json(json& j, const GeometryConfig& g) {
  j = json{{"vertex_count", g.vertex_count},
           {"benign_area", g.benign_area},
           {"malignant_area", g.malignant_area},
           {"harmonic_amp", g.harmonic_amp},
           {"harmonic_phase", g.harmonic_phase},
           {"spike_count", g.spike_count},
           {"spike_amp", g.spike_amp},
           {"spike_sharpness", g.spike_sharpness},
           {"spike_phase", g.spike_phase}};
}

void from_json(const json& j, GeometryConfig& g) {
  g.vertex_count = j.value("vertex_count", g.vertex_count);
  g.benign_area = j.value("benign_area", g.benign_area);
  g.malignant_area = j.value("malignant_area", g.malignant_area);
  g.harmonic_amp = j.value("harmonic_amp", g.harmonic_amp);
  g.harmonic_phase = j.value("harmonic_phase", g.harmonic_phase);
  g.spike_count = j.value("spike_count", g.spike_count);
  g.spike_amp = j.value("spike_amp", g.spike_amp);
  g.spike_sharpness = j.value("spike_sharpness", g.spike_sharpness);
  g.spike_phase = j.value("spike_phase", g.spike_phase);
}

void to_json(json& j, const TransformConfig& t) {
  j = json{{"rotation_deg", t.rotation_deg},
           {"scale_lo", t.scale_lo},
           {"scale_hi", t.scale_hi},
           {"shear", t.shear},
           {"translate", t.translate},
           {"ffd_grid", t.ffd_grid},
           {"ffd_cap", t.ffd_cap},
           {"max_retries", t.max_retries},
           {"margin_px", t.margin_px}};
}

void from_json(const json& j, TransformConfig& t) {
  t.rotation_deg = j.value("rotation_deg", t.rotation_deg);
  t.scale_lo = j.value("scale_lo", t.scale_lo);
  t.scale_hi = j.value("scale_hi", t.scale_hi);
  t.shear = j.value("shear", t.shear);
  t.translate = j.value("translate", t.translate);
  t.ffd_grid = j.value("ffd_grid", t.ffd_grid);
  t.ffd_cap = j.value("ffd_cap", t.ffd_cap);
  t.max_retries = j.value("max_retries", t.max_retries);
  t.margin_px = j.value("margin_px", t.margin_px);
}

void to_json(json& j, const DistributionSpec& s) {
  j = json{{"i_mal", s.i_mal},
           {"i_ben", s.i_ben},
           {"noise_sigma", s.noise_sigma},
           {"background", s.background},
           {"image_size", s.image_size}};
}

void from_json(const json& j, DistributionSpec& s) {
  s.i_mal = j.at("i_mal").get<int>();
  s.i_ben = j.at("i_ben").get<int>();
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.background = j.value("background", s.background);
  s.image_size = j.value("image_size", s.image_size);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs},
           {"batch_size", c.batch_size},
           {"lr", c.lr},
           {"split_fraction", c.split_fraction},
           {"n_train_pool", c.n_train_pool},
           {"n_test", c.n_test},
           {"seed", c.seed},
           {"loss", to_string(c.loss)},
           {"margin", c.margin}};
}

void from_json(const json& j, TrainConfig& c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.split_fraction = j.value("split_fraction", c.split_fraction);
  c.n_train_pool = j.value("n_train_pool", c.n_train_pool);
  c.n_test = j.value("n_test", c.n_test);
  c.seed = j.value("seed", c.seed);
  if (j.contains("loss")) c.loss = loss_from_string(j.at("loss"));
  c.margin = j.value("margin", c.margin);
}

}  // namespace oodlab
