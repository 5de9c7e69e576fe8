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

#ifndef OODLAB_CORE_ANALYSIS_HPP_
#define OODLAB_CORE_ANALYSIS_HPP_

// Read-only evaluation tools: confusion metrics with malignant as the
// positive class, a two-component PCA of the 84-dim embedding space, and
// input-gradient saliency maps.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/nnmodels.hpp"
#include "core/synthgen.hpp"
#include "core/tensor.hpp"

namespace oodlab {

struct MetricsReport {
  double acc = 0.0;
  double se = 0.0;  // NaN when there are no positives
  double sp = 0.0;  // NaN when there are no negatives
  int64_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::string dataset_id;
  std::string model_id;

  int64_t total() const { return tp + tn + fp + fn; }
};

// Counts and ratios with `threshold` deciding the positive (malignant)
// prediction; a zero-denominator ratio is reported as NaN, never as 0.
MetricsReport confusion_metrics(const std::vector<double>& probabilities,
                                const std::vector<uint8_t>& labels,
                                double threshold = 0.5);

// One embedding row per sample, in dataset order.
Tensor extract_features(const EncoderParams& encoder, const Dataset& dataset);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pca {
  std::vector<double> mean;                    // feature-space mean
  std::array<std::vector<double>, 2> basis;    // orthonormal rows
  std::array<double, 2> explained_variance{};  // descending
  double total_variance = 0.0;
};

// Top-2 principal components of mean-centered features; sign convention:
// the largest-magnitude coordinate of each component is positive.
Pca pca_fit(const Tensor& features);

std::vector<Point2> pca_project(const Pca& pca, const Tensor& features);

struct Ellipse2Std {
  double cx = 0.0, cy = 0.0;
  double rx = 0.0, ry = 0.0;       // semi-axes at two standard deviations
  double angle_rad = 0.0;          // orientation of the rx axis
};

// Ellipse from the group's own principal axes; nullopt below 3 points.
std::optional<Ellipse2Std> ellipse_2std(const std::vector<Point2>& points);

struct SaliencyMap {
  std::vector<double> values;  // |d score / d pixel|, max-normalized
  int image_size = 0;
  bool all_zero = false;
};

// Gradient of the pre-sigmoid score w.r.t. the input image.
SaliencyMap saliency(const ModelParams& model, const Tensor& image);

// Same machinery for an arbitrary differentiable scorer; `score` must
// produce a one-element node from the staged input.
SaliencyMap saliency_of(const std::function<NodeId(Tape&, NodeId)>& score,
                        const Tensor& image);

// Full symmetric eigendecomposition by cyclic Jacobi rotations;
// eigenvalues descending, eigenvectors as rows.
void symmetric_eigen(const std::vector<double>& matrix, int n,
                     std::vector<double>* eigenvalues,
                     std::vector<double>* eigenvectors);

}  // namespace oodlab

#endif  // OODLAB_CORE_ANALYSIS_HPP_
