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

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/synthgen.hpp"

using namespace oodlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double isoperimetric_ratio(const Outline& o) {
  const double p = polygon_perimeter(o);
  return 4.0 * kPi * polygon_area(o) / (p * p);
}

double class_mean_global(const Dataset& ds, ShapeClass c) {
  double acc = 0.0;
  int n = 0;
  for (const LabeledImage& s : ds.samples) {
    if (s.label != c) continue;
    acc += global_mean(s);
    ++n;
  }
  return acc / n;
}

double class_mean_foreground(const Dataset& ds, ShapeClass c) {
  double acc = 0.0;
  int64_t n = 0;
  for (const LabeledImage& s : ds.samples) {
    if (s.label != c) continue;
    for (size_t i = 0; i < s.pixels.size(); ++i) {
      if (s.mask[i]) {
        acc += static_cast<double>(s.pixels[i]) * 255.0;
        ++n;
      }
    }
  }
  return acc / static_cast<double>(n);
}

}  // namespace

TEST_CASE("canonical base outlines hit the calibrated area fractions") {
  const GeometryConfig geom;
  const double ben = canonical_area_fraction(ShapeClass::kBenign, geom, 64);
  const double mal = canonical_area_fraction(ShapeClass::kMalignant, geom, 64);
  // solving a*i_fg + (1-a)*b against the reported whole-image means gives
  // a_ben = 3/10 and a_mal = 7/30 with b ~= 97.8
  CHECK(std::abs(ben - 0.300) < 0.01);
  CHECK(std::abs(mal - 7.0 / 30.0) < 0.01);
}

TEST_CASE("polygon areas equal the configured targets by construction") {
  const GeometryConfig geom;
  CHECK(polygon_area(base_outline(ShapeClass::kBenign, geom)) ==
        doctest::Approx(geom.benign_area).epsilon(1e-9));
  CHECK(polygon_area(base_outline(ShapeClass::kMalignant, geom)) ==
        doctest::Approx(geom.malignant_area).epsilon(1e-9));
}

TEST_CASE("spikes off degenerates to the smooth benign-style blob") {
  GeometryConfig geom;
  const double ben_ratio =
      isoperimetric_ratio(base_outline(ShapeClass::kBenign, geom));
  geom.spike_amp = 0.0;
  const double mal_ratio =
      isoperimetric_ratio(base_outline(ShapeClass::kMalignant, geom));
  CHECK(std::abs(mal_ratio - ben_ratio) / ben_ratio < 0.02);
}

TEST_CASE("benign is smoother and larger than malignant") {
  const GeometryConfig geom;
  const Outline ben = base_outline(ShapeClass::kBenign, geom);
  const Outline mal = base_outline(ShapeClass::kMalignant, geom);
  const double ben_pp = polygon_perimeter(ben) * polygon_perimeter(ben) /
                        polygon_area(ben);
  const double mal_pp = polygon_perimeter(mal) * polygon_perimeter(mal) /
                        polygon_area(mal);
  CHECK(ben_pp < mal_pp);
  CHECK(polygon_area(ben) > polygon_area(mal));
}

TEST_CASE("degenerate transform ranges give the identity transform") {
  TransformConfig cfg;
  cfg.rotation_deg = 0;
  cfg.scale_lo = cfg.scale_hi = 1.0;
  cfg.shear = 0;
  cfg.translate = 0;
  cfg.ffd_cap = 0;
  Rng rng(3);
  const TransformSample t = sample_transform(rng, cfg);
  CHECK(t.affine[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.affine[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(t.affine[2]) < 1e-12);
  CHECK(std::abs(t.affine[5]) < 1e-12);
  for (const Vec2& d : t.ffd) {
    CHECK(d.x == 0.0);
    CHECK(d.y == 0.0);
  }
  CHECK(t.det() > 0.0);

  const GeometryConfig geom;
  const Outline base = base_outline(ShapeClass::kMalignant, geom);
  const Outline warped = warp(base, t);
  for (size_t i = 0; i < base.vertices.size(); ++i) {
    CHECK(warped.vertices[i].x == doctest::Approx(base.vertices[i].x).epsilon(1e-12));
    CHECK(warped.vertices[i].y == doctest::Approx(base.vertices[i].y).epsilon(1e-12));
  }
}

TEST_CASE("identical seeds give identical transform samples") {
  const TransformConfig cfg;
  Rng a(42), b(42);
  const TransformSample ta = sample_transform(a, cfg);
  const TransformSample tb = sample_transform(b, cfg);
  CHECK(ta.affine == tb.affine);
  for (size_t i = 0; i < ta.ffd.size(); ++i) {
    CHECK(ta.ffd[i].x == tb.ffd[i].x);
    CHECK(ta.ffd[i].y == tb.ffd[i].y);
  }
}

TEST_CASE("pure translation shifts the centroid exactly") {
  TransformSample t;
  t.affine = {1, 0, 0.03, 0, 1, -0.02};
  t.grid = 4;
  t.ffd.assign(16, Vec2{0, 0});
  const Outline base = base_outline(ShapeClass::kBenign, GeometryConfig{});
  const Outline moved = warp(base, t);
  double cx0 = 0, cy0 = 0, cx1 = 0, cy1 = 0;
  for (size_t i = 0; i < base.vertices.size(); ++i) {
    cx0 += base.vertices[i].x;
    cy0 += base.vertices[i].y;
    cx1 += moved.vertices[i].x;
    cy1 += moved.vertices[i].y;
  }
  const double n = static_cast<double>(base.vertices.size());
  CHECK((cx1 - cx0) / n == doctest::Approx(0.03).epsilon(1e-12));
  CHECK((cy1 - cy0) / n == doctest::Approx(-0.02).epsilon(1e-12));
}

TEST_CASE("a single displaced control point only moves vertices in its kernel support") {
  // control point (1,1) sits at (1/3, 1/3); the cubic kernel support is
  // |x - 1/3| < 2/3 and |y - 1/3| < 2/3
  TransformSample t;
  t.grid = 4;
  t.ffd.assign(16, Vec2{0, 0});
  t.ffd[1 * 4 + 1] = {0.05, 0.0};
  Outline grid_points;
  for (int i = 0; i < 21; ++i) {
    for (int j = 0; j < 21; ++j) {
      grid_points.vertices.push_back({i / 20.0, j / 20.0});
    }
  }
  const Outline moved = warp(grid_points, t);
  const double h = 1.0 / 3.0;
  for (size_t i = 0; i < grid_points.vertices.size(); ++i) {
    const Vec2& v = grid_points.vertices[i];
    const bool in_support =
        std::abs(v.x - h) < 2 * h && std::abs(v.y - h) < 2 * h;
    const double disp = std::hypot(moved.vertices[i].x - v.x,
                                   moved.vertices[i].y - v.y);
    if (!in_support) {
      CHECK(disp == 0.0);
    }
  }
  // the control point location itself moves the most
  const Outline probe = warp(
      Outline{{Vec2{h, h}}, true}, t);
  CHECK(std::abs(probe.vertices[0].x - h) > 0.01);
}

TEST_CASE("rasterize: unit square covers the full image") {
  Outline square;
  square.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Mask m = rasterize(square, 16);
  CHECK(m.count == 16 * 16);
}

TEST_CASE("rasterize: disk pixel count within 2% of pi r^2") {
  Outline disk;
  const double r = 20.0 / 64.0;
  for (int i = 0; i < 256; ++i) {
    const double phi = 2.0 * kPi * i / 256;
    disk.vertices.push_back({0.5 + r * std::cos(phi), 0.5 + r * std::sin(phi)});
  }
  const Mask m = rasterize(disk, 64);
  const double expected = kPi * 20.0 * 20.0;
  CHECK(std::abs(static_cast<double>(m.count) - expected) / expected < 0.02);
}

TEST_CASE("rasterize is deterministic") {
  const Outline o = base_outline(ShapeClass::kMalignant, GeometryConfig{});
  const Mask a = rasterize(o, 64);
  const Mask b = rasterize(o, 64);
  CHECK(a.inside == b.inside);
  CHECK(a.count == b.count);
}

TEST_CASE("render obeys the noise and normalization contract") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Outline o = base_outline(ShapeClass::kBenign, GeometryConfig{});
  const Mask m = rasterize(o, spec.image_size);

  SUBCASE("sigma 0 renders exact foreground and background values") {
    spec.noise_sigma = 0.0;
    spec.background = 97.8;
    Rng rng(5);
    const LabeledImage img = render(m, spec, ShapeClass::kBenign, rng);
    const float fg = static_cast<float>(150.0 / 255.0);
    const float bg = static_cast<float>(97.8 / 255.0);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      CHECK(img.pixels[i] == (m.inside[i] ? fg : bg));
    }
  }

  SUBCASE("sigma 5 keeps the foreground sample mean within 1 unit") {
    spec.noise_sigma = 5.0;
    Rng rng(6);
    const LabeledImage img = render(m, spec, ShapeClass::kBenign, rng);
    REQUIRE(m.count >= 900);
    double acc = 0.0;
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      if (m.inside[i]) acc += static_cast<double>(img.pixels[i]) * 255.0;
    }
    CHECK(std::abs(acc / static_cast<double>(m.count) - 150.0) < 1.0);
  }
}

TEST_CASE("generate_dataset is balanced, deterministic, and rejects odd n") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  CHECK_THROWS_AS(
      generate_dataset(spec, 7, 1, DatasetRole::kTrain), Error);

  const Dataset a = generate_dataset(spec, 40, 9, DatasetRole::kTrain);
  int benign = 0, malignant = 0;
  for (const LabeledImage& s : a.samples) {
    (s.label == ShapeClass::kBenign ? benign : malignant)++;
    const double frac =
        static_cast<double>(std::count(s.mask.begin(), s.mask.end(), 1)) /
        static_cast<double>(s.mask.size());
    CHECK(frac >= 0.15);
    CHECK(frac <= 0.40);
    for (float p : s.pixels) {
      CHECK(p >= 0.0f);
      CHECK(p <= 1.0f);
    }
  }
  CHECK(benign == 20);
  CHECK(malignant == 20);

  const Dataset b = generate_dataset(spec, 40, 9, DatasetRole::kTrain);
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].pixels == b.samples[i].pixels);
    CHECK(a.samples[i].mask == b.samples[i].mask);
    CHECK(a.samples[i].sample_seed == b.samples[i].sample_seed);
  }
}

TEST_CASE("off-grid intensities are rejected") {
  DistributionSpec spec;
  spec.i_mal = 155;
  spec.i_ben = 150;
  CHECK_THROWS_AS(generate_dataset(spec, 4, 1, DatasetRole::kTrain), Error);
  spec.i_mal = 210;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("1000 seeded draws produce zero invariant violations after retries") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const GeometryConfig geom;
  const TransformConfig tcfg;
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const ShapeClass c =
        i % 2 == 0 ? ShapeClass::kBenign : ShapeClass::kMalignant;
    const LabeledImage img =
        generate_sample(spec, c, geom, tcfg, derive_sample_seed(777, i));
    const double frac =
        static_cast<double>(std::count(img.mask.begin(), img.mask.end(), 1)) /
        static_cast<double>(img.mask.size());
    if (frac >= 0.15 && frac <= 0.40) ++ok;
  }
  CHECK(ok == 1000);
}

TEST_CASE("global_mean of a constant image is that constant") {
  LabeledImage img;
  img.image_size = 8;
  img.pixels.assign(64, static_cast<float>(123.0 / 255.0));
  img.mask.assign(64, 0);
  CHECK(std::abs(global_mean(img) - 123.0) < 1e-3);
}

TEST_CASE("calibration: whole-image means match the reported values") {
  // over >= 100 samples per class
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset d150 = generate_dataset(spec, 200, 31, DatasetRole::kTrain);
  const double mal150 = class_mean_global(d150, ShapeClass::kMalignant);
  const double ben150 = class_mean_global(d150, ShapeClass::kBenign);
  CHECK(std::abs(mal150 - 110.0) < 2.0);
  CHECK(std::abs(ben150 - 114.0) < 2.0);
  CHECK(mal150 < ben150);

  spec.i_mal = 180;
  spec.i_ben = 160;
  const Dataset d180 = generate_dataset(spec, 200, 32, DatasetRole::kTrain);
  CHECK(std::abs(class_mean_global(d180, ShapeClass::kMalignant) - 117.0) < 1.0);
  CHECK(std::abs(class_mean_global(d180, ShapeClass::kBenign) - 117.0) < 1.0);
}

TEST_CASE("per-class foreground means land on the configured intensity") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 200, 33, DatasetRole::kTrain);
  CHECK(std::abs(class_mean_foreground(ds, ShapeClass::kMalignant) - 150.0) < 1.0);
  CHECK(std::abs(class_mean_foreground(ds, ShapeClass::kBenign) - 150.0) < 1.0);
}

TEST_CASE("mean mask fraction of benign exceeds malignant") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 200, 34, DatasetRole::kTrain);
  double fb = 0, fm = 0;
  for (const LabeledImage& s : ds.samples) {
    const double frac =
        static_cast<double>(std::count(s.mask.begin(), s.mask.end(), 1)) /
        static_cast<double>(s.mask.size());
    (s.label == ShapeClass::kBenign ? fb : fm) += frac;
  }
  CHECK(fb / 100.0 > fm / 100.0);
}

TEST_CASE("equalizing_pair closed form") {
  SUBCASE("the calibrated fractions give (180,160) for target 117") {
    const EqualizingPair p = equalizing_pair(7.0 / 30.0, 0.3, 97.8, 117.0);
    CHECK(p.i_mal == 180);
    CHECK(p.i_ben == 160);
    // exact solutions of a*i + (1-a)*b = 117
    CHECK(p.exact_mal == doctest::Approx((117.0 - (23.0 / 30.0) * 97.8) /
                                         (7.0 / 30.0)).epsilon(1e-12));
    CHECK(p.exact_ben == doctest::Approx((117.0 - 0.7 * 97.8) / 0.3)
                             .epsilon(1e-12));
  }
  SUBCASE("equal fractions give equal intensities") {
    const EqualizingPair p = equalizing_pair(0.25, 0.25, 97.8, 110.0);
    CHECK(p.i_mal == p.i_ben);
    CHECK(p.exact_mal == p.exact_ben);
  }
  SUBCASE("target equal to background solves to the background") {
    const EqualizingPair p =
        equalizing_pair(0.2, 0.3, 97.8, 97.8, /*snap=*/false);
    CHECK(p.exact_mal == doctest::Approx(97.8).epsilon(1e-12));
    CHECK(p.exact_ben == doctest::Approx(97.8).epsilon(1e-12));
  }
  SUBCASE("solutions off the grid are a range error") {
    CHECK_THROWS_AS(equalizing_pair(0.05, 0.3, 97.8, 117.0), Error);
    CHECK_THROWS_AS(equalizing_pair(0.2, 0.3, 97.8, 97.8), Error);
    CHECK_THROWS_AS(equalizing_pair(1.5, 0.3, 97.8, 117.0), Error);
  }
}
