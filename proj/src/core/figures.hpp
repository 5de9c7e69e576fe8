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

#ifndef OODLAB_CORE_FIGURES_HPP_
#define OODLAB_CORE_FIGURES_HPP_

// Deterministic figure output: binary PGM for raw maps, and SVG for the
// PCA scatter and saliency-grid figures (tiles embedded as base64 PNG).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"

namespace oodlab {

// `pixels` are [0,1]; values are rounded to a 255-max binary PGM. A nonempty
// config hash is embedded as a PGM comment.
void write_pgm(const std::filesystem::path& path,
               const std::vector<float>& pixels, int size,
               const std::string& config_hash);
void write_pgm(const std::filesystem::path& path,
               const std::vector<double>& values, int size,
               const std::string& config_hash);

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> gray;
};

PgmImage read_pgm(const std::filesystem::path& path);

std::vector<uint8_t> encode_png_gray(const std::vector<uint8_t>& gray,
                                     int width, int height);

struct ScatterGroup {
  std::string name;
  std::string color;   // "#rrggbb"
  char marker = 'o';   // 'o' or 'x'
  std::vector<Point2> points;
  std::optional<Ellipse2Std> ellipse;
};

std::string svg_scatter(const std::string& title,
                        const std::vector<ScatterGroup>& groups,
                        const std::string& config_hash);

struct SaliencyRow {
  std::string label;  // e.g. "train" or "test 170,130"
  // image/map pairs, both gray [0,255], tile_size^2 each
  std::vector<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>> tiles;
};

std::string svg_saliency_grid(const std::string& title, int tile_size,
                              const std::vector<SaliencyRow>& rows,
                              const std::string& config_hash);

}  // namespace oodlab

#endif  // OODLAB_CORE_FIGURES_HPP_
