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

#include "core/nnmodels.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace oodlab {

namespace {

// Uniform +-1/sqrt(fan_in); biases stay zero.
void init_uniform(Tensor& w, int64_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (int64_t i = 0; i < w.numel(); ++i) {
    w[i] = rng.uniform(-bound, bound);
  }
}

}  // namespace

EncoderParams EncoderParams::init(uint64_t seed) {
  Rng rng(mix64(seed, hash64("encoder-init")));
  EncoderParams p;
  init_uniform(p.conv1_w, 1 * 5 * 5, rng);
  init_uniform(p.conv2_w, 6 * 5 * 5, rng);
  init_uniform(p.fc1_w, 400, rng);
  init_uniform(p.fc2_w, 120, rng);
  return p;
}

std::vector<Tensor*> EncoderParams::tensors() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b,
          &fc1_w,   &fc1_b,   &fc2_w,   &fc2_b};
}

std::vector<const Tensor*> EncoderParams::tensors() const {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b,
          &fc1_w,   &fc1_b,   &fc2_w,   &fc2_b};
}

std::vector<std::string> EncoderParams::names() {
  return {"conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
          "fc1.weight",   "fc1.bias",   "fc2.weight",   "fc2.bias"};
}

std::vector<Shape> EncoderParams::layer_shapes() const {
  std::vector<Shape> shapes;
  for (const Tensor* t : tensors()) shapes.push_back(t->shape());
  return shapes;
}

ClassifierParams ClassifierParams::init(uint64_t seed) {
  // Zero start: p = 0.5 everywhere, and the 84->1 probe has no random
  // offset to unlearn within its small total Adam travel (lr * steps).
  (void)seed;
  return ClassifierParams{};
}

std::vector<Tensor*> ClassifierParams::tensors() { return {&fc_w, &fc_b}; }

std::vector<const Tensor*> ClassifierParams::tensors() const {
  return {&fc_w, &fc_b};
}

std::vector<std::string> ClassifierParams::names() {
  return {"cls.weight", "cls.bias"};
}

void ContrastiveConfig::validate() const {
  require(margin > 0.0, ErrorKind::kArgument,
          "contrastive margin must be positive");
}

EncoderNodes stage_encoder(Tape& t, const EncoderParams& p,
                           bool requires_grad) {
  return EncoderNodes{
      t.leaf(p.conv1_w, requires_grad), t.leaf(p.conv1_b, requires_grad),
      t.leaf(p.conv2_w, requires_grad), t.leaf(p.conv2_b, requires_grad),
      t.leaf(p.fc1_w, requires_grad),   t.leaf(p.fc1_b, requires_grad),
      t.leaf(p.fc2_w, requires_grad),   t.leaf(p.fc2_b, requires_grad)};
}

ClassifierNodes stage_classifier(Tape& t, const ClassifierParams& p,
                                 bool requires_grad) {
  return ClassifierNodes{t.leaf(p.fc_w, requires_grad),
                         t.leaf(p.fc_b, requires_grad)};
}

NodeId encoder_forward(Tape& t, const EncoderNodes& enc, NodeId x) {
  const Tensor& xv = t.value(x);
  require(xv.rank() == 4 && xv.dim(1) == 1 && xv.dim(2) == kInputSize &&
              xv.dim(3) == kInputSize,
          ErrorKind::kArgument,
          "encoder input must be (N,1,64,64), got " +
              Tensor::shape_str(xv.shape()));
  NodeId h = avgpool2x2(t, x);                           // (N,1,32,32)
  h = tanh_op(t, add_bias(t, conv2d(t, h, enc.conv1_w), enc.conv1_b));
  h = maxpool2x2(t, h);                                  // (N,6,14,14)
  h = tanh_op(t, add_bias(t, conv2d(t, h, enc.conv2_w), enc.conv2_b));
  h = maxpool2x2(t, h);                                  // (N,16,5,5)
  h = flatten(t, h);                                     // (N,400)
  h = tanh_op(t, add_bias(t, matmul(t, h, enc.fc1_w), enc.fc1_b));
  h = tanh_op(t, add_bias(t, matmul(t, h, enc.fc2_w), enc.fc2_b));
  return h;                                              // (N,84)
}

NodeId classifier_score(Tape& t, const ClassifierNodes& cls,
                        NodeId embedding) {
  const Tensor& ev = t.value(embedding);
  require(ev.rank() == 2 && ev.dim(1) == kEmbeddingDim, ErrorKind::kArgument,
          "classifier input must be (N,84), got " +
              Tensor::shape_str(ev.shape()));
  return add_bias(t, matmul(t, embedding, cls.fc_w), cls.fc_b);
}

NodeId classifier_forward(Tape& t, const ClassifierNodes& cls,
                          NodeId embedding) {
  return sigmoid_op(t, classifier_score(t, cls, embedding));
}

Tensor encode(const EncoderParams& enc, const Tensor& images) {
  Tape tape;
  const NodeId x = tape.leaf(images, false);
  const EncoderNodes nodes = stage_encoder(tape, enc, false);
  const NodeId e = encoder_forward(tape, nodes, x);
  return tape.value(e);
}

std::vector<double> predict_probabilities(const ModelParams& model,
                                          const Tensor& images) {
  Tape tape;
  const NodeId x = tape.leaf(images, false);
  const EncoderNodes enc = stage_encoder(tape, model.encoder, false);
  const ClassifierNodes cls = stage_classifier(tape, model.classifier, false);
  const NodeId p = classifier_forward(tape, cls, encoder_forward(tape, enc, x));
  const Tensor& pv = tape.value(p);
  std::vector<double> out(static_cast<size_t>(pv.numel()));
  for (int64_t i = 0; i < pv.numel(); ++i) out[static_cast<size_t>(i)] = pv[i];
  return out;
}

Tensor batch_to_tensor(const std::vector<const float*>& images, int size) {
  const int64_t n = static_cast<int64_t>(images.size());
  const int64_t hw = static_cast<int64_t>(size) * size;
  Tensor out({n, 1, size, size});
  for (int64_t i = 0; i < n; ++i) {
    const float* src = images[static_cast<size_t>(i)];
    double* dst = out.data() + i * hw;
    for (int64_t j = 0; j < hw; ++j) dst[j] = static_cast<double>(src[j]);
  }
  return out;
}

double ce_loss(double p, int label) {
  require(label == 0 || label == 1, ErrorKind::kArgument,
          "ce_loss label must be 0 or 1");
  const double ph = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return label == 1 ? -std::log(ph) : -std::log(1.0 - ph);
}

double pair_distance(const std::vector<double>& e0,
                     const std::vector<double>& e1) {
  require(e0.size() == e1.size(), ErrorKind::kArgument,
          "pair_distance: dimension mismatch");
  double sq = 0.0;
  for (size_t i = 0; i < e0.size(); ++i) {
    const double d = e0[i] - e1[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double contrastive_loss(const std::vector<double>& e0,
                        const std::vector<double>& e1, int y0, int y1,
                        const ContrastiveConfig& cfg) {
  cfg.validate();
  const double d = pair_distance(e0, e1);
  if (y0 == y1) return d * d;
  const double h = std::max(0.0, cfg.margin - d);
  return h * h;
}

}  // namespace oodlab
