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

#ifndef OODLAB_CORE_SYNTHGEN_HPP_
#define OODLAB_CORE_SYNTHGEN_HPP_

// Procedural two-class shape dataset with controlled shape and intensity
// modes. Both classes share one low-frequency radial backbone; the malignant
// class adds a ring of spikes (spiculation). Outlines are scaled so the
// canonical-pose area fraction hits a configured target, which pins the
// whole-image mean intensities that the experiments rely on.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace oodlab {

enum class ShapeClass : uint8_t { kBenign = 0, kMalignant = 1 };

enum class DatasetRole : uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

const char* to_string(ShapeClass c);
const char* to_string(DatasetRole r);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct GeometryConfig {
  int vertex_count = 256;
  // Canonical-pose foreground area targets, as fractions of the unit square.
  double benign_area = 0.305;
  double malignant_area = 7.0 / 30.0;
  // Shared low-frequency backbone, harmonics k = 1..3.
  std::array<double, 3> harmonic_amp = {0.055, 0.040, 0.030};
  std::array<double, 3> harmonic_phase = {0.7, 2.1, 4.4};
  // Spiculation (malignant only).
  int spike_count = 12;
  double spike_amp = 0.22;
  double spike_sharpness = 2.0;
  double spike_phase = 0.25;
};

struct TransformConfig {
  double rotation_deg = 20.0;
  double scale_lo = 0.9;
  double scale_hi = 1.1;
  double shear = 0.1;
  double translate = 0.05;
  int ffd_grid = 4;       // control points per side
  double ffd_cap = 0.05;  // max |displacement| per axis, unit-square units
  int max_retries = 100;
  double margin_px = 2.0;  // required clearance to the image border
};

struct DistributionSpec {
  int i_mal = 150;  // mean foreground intensity, malignant
  int i_ben = 150;  // mean foreground intensity, benign
  double noise_sigma = 5.0;
  double background = 97.8;
  int image_size = 64;

  int foreground(ShapeClass c) const {
    return c == ShapeClass::kMalignant ? i_mal : i_ben;
  }
  // Throws unless both intensities lie on the {110,120,...,200} grid.
  void validate() const;
  std::string label() const;  // "i_mal,i_ben"
};

constexpr int kIntensityGridLo = 110;
constexpr int kIntensityGridHi = 200;
constexpr int kIntensityGridStep = 10;

struct Outline {
  std::vector<Vec2> vertices;
  bool closed = true;
};

struct TransformSample {
  // Row-major 2x3 map: p' = [m00 m01; m10 m11] p + [m02; m12].
  std::array<double, 6> affine = {1, 0, 0, 0, 1, 0};
  std::vector<Vec2> ffd;  // grid*grid control displacements, row-major
  int grid = 4;

  double det() const { return affine[0] * affine[4] - affine[1] * affine[3]; }
};

struct Mask {
  int size = 0;
  std::vector<uint8_t> inside;  // size*size, row-major, 0/1
  int64_t count = 0;            // number of foreground pixels

  double fraction() const {
    return size == 0 ? 0.0
                     : static_cast<double>(count) /
                           (static_cast<double>(size) * size);
  }
};

struct LabeledImage {
  std::vector<float> pixels;    // normalized to [0,1], row-major
  std::vector<uint8_t> mask;    // foreground flags, row-major
  ShapeClass label = ShapeClass::kBenign;
  uint32_t sample_seed = 0;
  int image_size = 0;
};

struct Dataset {
  DistributionSpec spec;
  std::vector<LabeledImage> samples;
  uint64_t seed = 0;
  DatasetRole role = DatasetRole::kTrain;
  GeometryConfig geometry;
  TransformConfig transform;
};

// ---- Geometry ----

// Canonical-pose outline for a class, centered at (0.5, 0.5), scaled so the
// continuous polygon area equals the configured class area target.
Outline base_outline(ShapeClass c, const GeometryConfig& geom);

TransformSample sample_transform(Rng& rng, const TransformConfig& cfg);

// Affine first, then the cubic B-spline FFD displacement field.
Outline warp(const Outline& outline, const TransformSample& t);

bool is_simple(const Outline& outline);
bool within_bounds(const Outline& outline, double margin);

double polygon_area(const Outline& outline);
double polygon_perimeter(const Outline& outline);

// Boolean mask from an even-odd point-in-polygon test at pixel centers.
Mask rasterize(const Outline& outline, int image_size);

// ---- Appearance ----

LabeledImage render(const Mask& mask, const DistributionSpec& spec,
                    ShapeClass c, Rng& rng);

// Mean over all pixels, foreground and background, in grayscale units.
double global_mean(const LabeledImage& img);

// ---- Dataset assembly ----

uint32_t derive_sample_seed(uint64_t dataset_seed, int64_t index);

LabeledImage generate_sample(const DistributionSpec& spec, ShapeClass c,
                             const GeometryConfig& geom,
                             const TransformConfig& tcfg, uint32_t sample_seed);

Dataset generate_dataset(const DistributionSpec& spec, int64_t n,
                         uint64_t seed, DatasetRole role,
                         const GeometryConfig& geom = {},
                         const TransformConfig& tcfg = {});

// Pixel-counted area fraction of the canonical (untransformed) outline.
double canonical_area_fraction(ShapeClass c, const GeometryConfig& geom,
                               int image_size);

// ---- Calibration ----

struct EqualizingPair {
  int i_mal = 0;  // grid-snapped
  int i_ben = 0;
  double exact_mal = 0.0;
  double exact_ben = 0.0;
};

// Solves a*i + (1-a)*background = target_global per class. When `snap` is
// set, the exact solutions are snapped to the nearest intensity-grid value
// and an out-of-range solution is a range error.
EqualizingPair equalizing_pair(double a_mal, double a_ben, double background,
                               double target_global, bool snap = true);

}  // namespace oodlab

#endif  // OODLAB_CORE_SYNTHGEN_HPP_
