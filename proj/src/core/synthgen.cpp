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

#include "core/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace oodlab {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Cardinal cubic B-spline kernel, support |t| < 2.
double bspline3(double t) {
  const double a = std::abs(t);
  if (a < 1.0) return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
  if (a < 2.0) {
    const double b = 2.0 - a;
    return b * b * b / 6.0;
  }
  return 0.0;
}

// Unscaled radial profile (r0 = 1).
double radial_profile(double phi, ShapeClass c, const GeometryConfig& g) {
  double rho = 1.0;
  for (size_t k = 0; k < g.harmonic_amp.size(); ++k) {
    rho += g.harmonic_amp[k] *
           std::cos(static_cast<double>(k + 1) * phi + g.harmonic_phase[k]);
  }
  if (c == ShapeClass::kMalignant && g.spike_amp != 0.0) {
    const double bump =
        0.5 * (1.0 + std::cos(g.spike_count * phi + g.spike_phase));
    rho += g.spike_amp * std::pow(bump, g.spike_sharpness);
  }
  return rho;
}

struct Segment {
  Vec2 a, b;
};

int orientation(const Vec2& p, const Vec2& q, const Vec2& r) {
  const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
         std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, t.a, s.b)) return true;
  if (o2 == 0 && on_segment(s.a, t.b, s.b)) return true;
  if (o3 == 0 && on_segment(t.a, s.a, t.b)) return true;
  if (o4 == 0 && on_segment(t.a, s.b, t.b)) return true;
  return false;
}

}  // namespace

const char* to_string(ShapeClass c) {
  return c == ShapeClass::kMalignant ? "malignant" : "benign";
}

const char* to_string(DatasetRole r) {
  switch (r) {
    case DatasetRole::kTrain: return "train";
    case DatasetRole::kVal: return "val";
    case DatasetRole::kTest: return "test";
  }
  return "unknown";
}

void DistributionSpec::validate() const {
  for (int v : {i_mal, i_ben}) {
    const bool on_grid = v >= kIntensityGridLo && v <= kIntensityGridHi &&
                         (v - kIntensityGridLo) % kIntensityGridStep == 0;
    require(on_grid, ErrorKind::kArgument,
            "foreground intensity " + std::to_string(v) +
                " is not on the {110,120,...,200} grid");
  }
  require(noise_sigma >= 0.0, ErrorKind::kArgument, "negative noise sigma");
  require(image_size > 0 && image_size % 2 == 0, ErrorKind::kArgument,
          "image size must be positive and even");
}

std::string DistributionSpec::label() const {
  return std::to_string(i_mal) + "," + std::to_string(i_ben);
}

Outline base_outline(ShapeClass c, const GeometryConfig& geom) {
  require(geom.vertex_count >= 64, ErrorKind::kArgument,
          "outline vertex count must be >= 64");
  const int n = geom.vertex_count;
  // Unit-scale polygon, then rescale so the shoelace area hits the target.
  std::vector<double> rho(static_cast<size_t>(n));
  Outline unit;
  unit.vertices.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = kTau * i / n;
    rho[static_cast<size_t>(i)] = radial_profile(phi, c, geom);
    unit.vertices[static_cast<size_t>(i)] = {
        rho[static_cast<size_t>(i)] * std::cos(phi),
        rho[static_cast<size_t>(i)] * std::sin(phi)};
  }
  const double unit_area = polygon_area(unit);
  const double target =
      c == ShapeClass::kMalignant ? geom.malignant_area : geom.benign_area;
  require(target > 0.0 && target < 1.0, ErrorKind::kArgument,
          "area target must lie in (0,1)");
  const double r0 = std::sqrt(target / unit_area);
  Outline out;
  out.vertices.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = kTau * i / n;
    const double r = r0 * rho[static_cast<size_t>(i)];
    out.vertices[static_cast<size_t>(i)] = {0.5 + r * std::cos(phi),
                                            0.5 + r * std::sin(phi)};
  }
  return out;
}

TransformSample sample_transform(Rng& rng, const TransformConfig& cfg) {
  require(cfg.ffd_grid >= 2, ErrorKind::kConfig, "ffd grid must be >= 2");
  require(cfg.scale_lo > 0.0 && cfg.scale_hi >= cfg.scale_lo,
          ErrorKind::kConfig, "invalid scale range");
  const double theta =
      rng.uniform(-cfg.rotation_deg, cfg.rotation_deg) * kTau / 360.0;
  const double sx = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  const double sy = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  const double shear = rng.uniform(-cfg.shear, cfg.shear);
  const double tx = rng.uniform(-cfg.translate, cfg.translate);
  const double ty = rng.uniform(-cfg.translate, cfg.translate);

  // A = R(theta) * Shear(k) * Scale(sx, sy), applied about the image center.
  const double ct = std::cos(theta), st = std::sin(theta);
  const double m00 = sx * ct;
  const double m01 = sy * (shear * ct - st);
  const double m10 = sx * st;
  const double m11 = sy * (shear * st + ct);
  const double cx = 0.5, cy = 0.5;
  TransformSample t;
  t.affine = {m00, m01, cx - (m00 * cx + m01 * cy) + tx,
              m10, m11, cy - (m10 * cx + m11 * cy) + ty};
  t.grid = cfg.ffd_grid;
  t.ffd.resize(static_cast<size_t>(cfg.ffd_grid) * cfg.ffd_grid);
  for (auto& d : t.ffd) {
    d.x = rng.uniform(-cfg.ffd_cap, cfg.ffd_cap);
    d.y = rng.uniform(-cfg.ffd_cap, cfg.ffd_cap);
  }
  // det = sx*sy > 0 by construction; guarded anyway.
  require(t.det() > 0.0, ErrorKind::kInternal, "affine determinant <= 0");
  return t;
}

Outline warp(const Outline& outline, const TransformSample& t) {
  const int g = t.grid;
  require(static_cast<int>(t.ffd.size()) == g * g, ErrorKind::kArgument,
          "ffd grid size mismatch");
  const double h = 1.0 / (g - 1);
  Outline out;
  out.closed = outline.closed;
  out.vertices.reserve(outline.vertices.size());
  for (const Vec2& v : outline.vertices) {
    const double ax = t.affine[0] * v.x + t.affine[1] * v.y + t.affine[2];
    const double ay = t.affine[3] * v.x + t.affine[4] * v.y + t.affine[5];
    double dx = 0.0, dy = 0.0;
    for (int i = 0; i < g; ++i) {
      const double wy = bspline3((ay - i * h) / h);
      if (wy == 0.0) continue;
      for (int j = 0; j < g; ++j) {
        const double wx = bspline3((ax - j * h) / h);
        if (wx == 0.0) continue;
        const Vec2& d = t.ffd[static_cast<size_t>(i) * g + j];
        dx += wx * wy * d.x;
        dy += wx * wy * d.y;
      }
    }
    out.vertices.push_back({ax + dx, ay + dy});
  }
  return out;
}

bool is_simple(const Outline& outline) {
  const size_t n = outline.vertices.size();
  if (n < 3) return false;
  std::vector<Segment> segs(n);
  for (size_t i = 0; i < n; ++i) {
    segs[i] = {outline.vertices[i], outline.vertices[(i + 1) % n]};
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      const Segment& a = segs[i];
      const Segment& b = segs[j];
      // cheap reject before the orientation tests
      if (std::max(a.a.x, a.b.x) < std::min(b.a.x, b.b.x)) continue;
      if (std::max(b.a.x, b.b.x) < std::min(a.a.x, a.b.x)) continue;
      if (std::max(a.a.y, a.b.y) < std::min(b.a.y, b.b.y)) continue;
      if (std::max(b.a.y, b.b.y) < std::min(a.a.y, a.b.y)) continue;
      if (segments_intersect(a, b)) return false;
    }
  }
  return true;
}

bool within_bounds(const Outline& outline, double margin) {
  for (const Vec2& v : outline.vertices) {
    if (v.x < margin || v.x > 1.0 - margin || v.y < margin ||
        v.y > 1.0 - margin) {
      return false;
    }
  }
  return true;
}

double polygon_area(const Outline& outline) {
  const size_t n = outline.vertices.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = outline.vertices[i];
    const Vec2& q = outline.vertices[(i + 1) % n];
    acc += p.x * q.y - q.x * p.y;
  }
  return std::abs(acc) * 0.5;
}

double polygon_perimeter(const Outline& outline) {
  const size_t n = outline.vertices.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = outline.vertices[i];
    const Vec2& q = outline.vertices[(i + 1) % n];
    acc += std::hypot(q.x - p.x, q.y - p.y);
  }
  return acc;
}

Mask rasterize(const Outline& outline, int image_size) {
  require(image_size > 0, ErrorKind::kArgument, "image size must be positive");
  require(outline.vertices.size() >= 3, ErrorKind::kArgument,
          "outline needs at least 3 vertices");
  Mask mask;
  mask.size = image_size;
  mask.inside.assign(static_cast<size_t>(image_size) * image_size, 0);
  const size_t n = outline.vertices.size();
  std::vector<double> crossings;
  crossings.reserve(16);
  for (int row = 0; row < image_size; ++row) {
    const double yc = (row + 0.5) / image_size;
    crossings.clear();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& p = outline.vertices[i];
      const Vec2& q = outline.vertices[(i + 1) % n];
      // half-open rule: count an edge once per scanline it spans
      if ((p.y <= yc && q.y > yc) || (q.y <= yc && p.y > yc)) {
        crossings.push_back(p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    uint8_t* out_row = mask.inside.data() +
                       static_cast<size_t>(row) * image_size;
    for (size_t k = 0; k + 1 < crossings.size(); k += 2) {
      // pixel centers in [c_{2k}, c_{2k+1}) are interior
      const int lo = std::max(
          0, static_cast<int>(std::ceil(crossings[k] * image_size - 0.5)));
      const int hi = std::min(
          image_size - 1,
          static_cast<int>(std::floor(crossings[k + 1] * image_size - 0.5)));
      for (int col = lo; col <= hi; ++col) {
        const double xc = (col + 0.5) / image_size;
        if (xc >= crossings[k] && xc < crossings[k + 1]) {
          out_row[col] = 1;
          ++mask.count;
        }
      }
    }
  }
  return mask;
}

LabeledImage render(const Mask& mask, const DistributionSpec& spec,
                    ShapeClass c, Rng& rng) {
  require(mask.count > 0, ErrorKind::kArgument, "render: empty mask");
  require(mask.size == spec.image_size, ErrorKind::kArgument,
          "render: mask size does not match spec image size");
  LabeledImage img;
  img.image_size = spec.image_size;
  img.label = c;
  img.mask = mask.inside;
  img.pixels.resize(mask.inside.size());
  const double fg = static_cast<double>(spec.foreground(c));
  for (size_t i = 0; i < mask.inside.size(); ++i) {
    const double mu = mask.inside[i] ? fg : spec.background;
    double v = mu + spec.noise_sigma * rng.normal();
    v = std::clamp(v, 0.0, 255.0);
    img.pixels[i] = static_cast<float>(v / 255.0);
  }
  return img;
}

double global_mean(const LabeledImage& img) {
  double acc = 0.0;
  for (float p : img.pixels) acc += p;
  return acc / static_cast<double>(img.pixels.size()) * 255.0;
}

uint32_t derive_sample_seed(uint64_t dataset_seed, int64_t index) {
  return static_cast<uint32_t>(
      mix64(dataset_seed, mix64(hash64("sample"), static_cast<uint64_t>(index))));
}

LabeledImage generate_sample(const DistributionSpec& spec, ShapeClass c,
                             const GeometryConfig& geom,
                             const TransformConfig& tcfg,
                             uint32_t sample_seed) {
  const Outline base = base_outline(c, geom);
  Rng rng(mix64(sample_seed, hash64("transform+noise")));
  const double margin = tcfg.margin_px / spec.image_size;
  for (int attempt = 0; attempt < tcfg.max_retries; ++attempt) {
    const TransformSample t = sample_transform(rng, tcfg);
    const Outline warped = warp(base, t);
    if (!within_bounds(warped, margin)) continue;
    if (!is_simple(warped)) continue;
    Mask mask = rasterize(warped, spec.image_size);
    const double frac = mask.fraction();
    if (frac < 0.15 || frac > 0.40) continue;
    LabeledImage img = render(mask, spec, c, rng);
    img.sample_seed = sample_seed;
    return img;
  }
  fail(ErrorKind::kConfig,
       "sample generation exceeded retry limit; transform ranges are too "
       "aggressive for the configured geometry");
}

Dataset generate_dataset(const DistributionSpec& spec, int64_t n,
                         uint64_t seed, DatasetRole role,
                         const GeometryConfig& geom,
                         const TransformConfig& tcfg) {
  spec.validate();
  require(n > 0 && n % 2 == 0, ErrorKind::kArgument,
          "dataset size must be positive and even, got " + std::to_string(n));
  Dataset ds;
  ds.spec = spec;
  ds.seed = seed;
  ds.role = role;
  ds.geometry = geom;
  ds.transform = tcfg;
  ds.samples.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const ShapeClass c =
        (i % 2 == 0) ? ShapeClass::kBenign : ShapeClass::kMalignant;
    ds.samples.push_back(
        generate_sample(spec, c, geom, tcfg, derive_sample_seed(seed, i)));
  }
  return ds;
}

double canonical_area_fraction(ShapeClass c, const GeometryConfig& geom,
                               int image_size) {
  const Mask mask = rasterize(base_outline(c, geom), image_size);
  return mask.fraction();
}

EqualizingPair equalizing_pair(double a_mal, double a_ben, double background,
                               double target_global, bool snap) {
  require(a_mal > 0.0 && a_mal < 1.0 && a_ben > 0.0 && a_ben < 1.0,
          ErrorKind::kArgument, "area fractions must lie in (0,1)");
  EqualizingPair out;
  out.exact_mal = (target_global - (1.0 - a_mal) * background) / a_mal;
  out.exact_ben = (target_global - (1.0 - a_ben) * background) / a_ben;
  if (snap) {
    auto snap_one = [](double exact) {
      const double lo = kIntensityGridLo - 0.5 * kIntensityGridStep;
      const double hi = kIntensityGridHi + 0.5 * kIntensityGridStep;
      require(exact >= lo && exact < hi, ErrorKind::kArgument,
              "equalizing intensity " + std::to_string(exact) +
                  " falls outside the {110,...,200} grid");
      const double steps =
          std::round((exact - kIntensityGridLo) / kIntensityGridStep);
      return kIntensityGridLo + kIntensityGridStep * static_cast<int>(steps);
    };
    out.i_mal = snap_one(out.exact_mal);
    out.i_ben = snap_one(out.exact_ben);
  } else {
    out.i_mal = static_cast<int>(std::lround(out.exact_mal));
    out.i_ben = static_cast<int>(std::lround(out.exact_ben));
  }
  return out;
}

}  // namespace oodlab
