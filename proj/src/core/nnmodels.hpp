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

#ifndef OODLAB_CORE_NNMODELS_HPP_
#define OODLAB_CORE_NNMODELS_HPP_

// LeNet-5-derived encoder and the binary classifier head, plus the two loss
// functions. 64x64 inputs are adapted to the classic 32x32 pipeline by an
// initial 2x2 average pool. The 84-dim fc2 output is the embedding used both
// by the contrastive loss and as the feature space for PCA.

#include <cstdint>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/tensor.hpp"

namespace oodlab {

constexpr int kInputSize = 64;
constexpr int kEmbeddingDim = 84;

struct EncoderParams {
  Tensor conv1_w{{6, 1, 5, 5}};
  Tensor conv1_b{{6}};
  Tensor conv2_w{{16, 6, 5, 5}};
  Tensor conv2_b{{16}};
  Tensor fc1_w{{400, 120}};
  Tensor fc1_b{{120}};
  Tensor fc2_w{{120, kEmbeddingDim}};
  Tensor fc2_b{{kEmbeddingDim}};

  static EncoderParams init(uint64_t seed);

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  static std::vector<std::string> names();
  // Layer shape list, used to assert architecture parity across pipelines.
  std::vector<Shape> layer_shapes() const;
};

struct ClassifierParams {
  Tensor fc_w{{kEmbeddingDim, 1}};
  Tensor fc_b{{1}};

  static ClassifierParams init(uint64_t seed);

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  static std::vector<std::string> names();
};

struct ModelParams {
  EncoderParams encoder;
  ClassifierParams classifier;
};

struct ContrastiveConfig {
  double margin = 1.0;

  void validate() const;
};

// Tape node handles for one staged parameter set. Staging the same params
// once and reusing the node ids is what makes siamese branches weight-shared.
struct EncoderNodes {
  NodeId conv1_w, conv1_b, conv2_w, conv2_b, fc1_w, fc1_b, fc2_w, fc2_b;
};
struct ClassifierNodes {
  NodeId fc_w, fc_b;
};

EncoderNodes stage_encoder(Tape& t, const EncoderParams& p,
                           bool requires_grad);
ClassifierNodes stage_classifier(Tape& t, const ClassifierParams& p,
                                 bool requires_grad);

// (N,1,64,64) in [0,1] -> (N,84) embedding.
NodeId encoder_forward(Tape& t, const EncoderNodes& enc, NodeId x);
// (N,84) -> (N,1) pre-sigmoid score.
NodeId classifier_score(Tape& t, const ClassifierNodes& cls, NodeId embedding);
// (N,84) -> (N,1) probability.
NodeId classifier_forward(Tape& t, const ClassifierNodes& cls,
                          NodeId embedding);

// Tape-free inference helpers.
Tensor encode(const EncoderParams& enc, const Tensor& images);
std::vector<double> predict_probabilities(const ModelParams& model,
                                          const Tensor& images);

// Batch of images as a (N,1,S,S) float64 tensor.
Tensor batch_to_tensor(const std::vector<const float*>& images, int size);

// ---- Losses ----

// -y log p - (1-y) log(1-p), with p clamped away from {0,1}.
double ce_loss(double p, int label);

// Euclidean distance between two same-length embeddings.
double pair_distance(const std::vector<double>& e0,
                     const std::vector<double>& e1);

// d^2 for same-class pairs, max(0, m-d)^2 otherwise.
double contrastive_loss(const std::vector<double>& e0,
                        const std::vector<double>& e1, int y0, int y1,
                        const ContrastiveConfig& cfg);

}  // namespace oodlab

#endif  // OODLAB_CORE_NNMODELS_HPP_
