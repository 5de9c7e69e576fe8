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

#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <numeric>

#include "core/adam.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace oodlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<int> class_indices(const Dataset& ds, ShapeClass c) {
  std::vector<int> out;
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    if (ds.samples[i].label == c) out.push_back(static_cast<int>(i));
  }
  return out;
}

Tensor labels_column(const std::vector<uint8_t>& labels,
                     const std::vector<int>& indices) {
  Tensor t({static_cast<int64_t>(indices.size()), 1});
  for (size_t i = 0; i < indices.size(); ++i) {
    t[static_cast<int64_t>(i)] =
        static_cast<double>(labels[static_cast<size_t>(indices[i])]);
  }
  return t;
}

struct CeEval {
  double loss = 0.0;
  double acc = 0.0;
};

CeEval evaluate_ce(const ModelParams& model, const Tensor& images,
                   const std::vector<uint8_t>& labels) {
  const std::vector<double> probs = [&] {
    Tape tape;
    const NodeId x = tape.leaf(images, false);
    const EncoderNodes enc = stage_encoder(tape, model.encoder, false);
    const ClassifierNodes cls = stage_classifier(tape, model.classifier, false);
    const NodeId p =
        classifier_forward(tape, cls, encoder_forward(tape, enc, x));
    const Tensor& pv = tape.value(p);
    std::vector<double> out(static_cast<size_t>(pv.numel()));
    for (int64_t i = 0; i < pv.numel(); ++i) out[static_cast<size_t>(i)] = pv[i];
    return out;
  }();
  CeEval ev;
  for (size_t i = 0; i < labels.size(); ++i) {
    ev.loss += ce_loss(probs[i], labels[i]);
  }
  ev.loss /= static_cast<double>(labels.size());
  ev.acc = accuracy(probs, labels);
  return ev;
}

double evaluate_pair_loss(const EncoderParams& enc, const Tensor& images,
                          const std::vector<uint8_t>& labels, double margin) {
  const Tensor emb = encode(enc, images);
  const std::vector<PairSample> pairs = make_pairs(labels);
  if (pairs.empty()) return kNan;
  const ContrastiveConfig cfg{margin};
  double acc = 0.0;
  std::vector<double> e0(static_cast<size_t>(kEmbeddingDim));
  std::vector<double> e1(static_cast<size_t>(kEmbeddingDim));
  for (const PairSample& p : pairs) {
    std::memcpy(e0.data(), emb.data() + p.first * kEmbeddingDim,
                sizeof(double) * kEmbeddingDim);
    std::memcpy(e1.data(), emb.data() + p.second * kEmbeddingDim,
                sizeof(double) * kEmbeddingDim);
    acc += contrastive_loss(e0, e1, labels[static_cast<size_t>(p.first)],
                            labels[static_cast<size_t>(p.second)], cfg);
  }
  return acc / static_cast<double>(pairs.size());
}

std::vector<const Tensor*> collect_grads(Tape& tape,
                                         const std::vector<NodeId>& nodes) {
  std::vector<const Tensor*> grads;
  grads.reserve(nodes.size());
  for (NodeId id : nodes) grads.push_back(&tape.grad(id));
  return grads;
}

[[noreturn]] void abort_run(const char* pipeline, int epoch, int batch,
                            const Error& e) {
  fail(ErrorKind::kRun, std::string(pipeline) + " training aborted at epoch " +
                            std::to_string(epoch) + ", batch " +
                            std::to_string(batch) + ": " + e.what());
}

}  // namespace

const char* to_string(LossKind k) {
  return k == LossKind::kContrastive ? "contrastive" : "ce";
}

LossKind loss_from_string(const std::string& s) {
  if (s == "ce" || s == "CE") return LossKind::kCe;
  if (s == "contrastive" || s == "Contrastive" || s == "contrast") {
    return LossKind::kContrastive;
  }
  fail(ErrorKind::kConfig, "unknown loss '" + s + "'");
}

void TrainConfig::validate() const {
  require(epochs >= 0, ErrorKind::kConfig, "epochs must be >= 0");
  require(batch_size >= 2, ErrorKind::kConfig, "batch size must be >= 2");
  require(lr > 0.0, ErrorKind::kConfig, "learning rate must be positive");
  require(split_fraction > 0.0 && split_fraction < 1.0, ErrorKind::kArgument,
          "split fraction must lie strictly inside (0,1)");
  require(n_train_pool > 0 && n_train_pool % 2 == 0, ErrorKind::kConfig,
          "train pool size must be positive and even");
  require(n_test > 0 && n_test % 2 == 0, ErrorKind::kConfig,
          "test size must be positive and even");
  require(margin > 0.0, ErrorKind::kConfig, "margin must be positive");
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::kArgument,
          "split fraction must lie strictly inside (0,1)");
  std::vector<int> benign = class_indices(dataset, ShapeClass::kBenign);
  std::vector<int> malignant = class_indices(dataset, ShapeClass::kMalignant);
  require(benign.size() == malignant.size(), ErrorKind::kArgument,
          "split requires a class-balanced dataset");
  Dataset train, val;
  for (Dataset* d : {&train, &val}) {
    d->spec = dataset.spec;
    d->seed = dataset.seed;
    d->geometry = dataset.geometry;
    d->transform = dataset.transform;
  }
  train.role = DatasetRole::kTrain;
  val.role = DatasetRole::kVal;
  std::vector<int> train_idx, val_idx;
  int tag = 0;
  for (std::vector<int>* cls : {&benign, &malignant}) {
    Rng rng(mix64(seed, mix64(hash64("split"), static_cast<uint64_t>(tag++))));
    rng.shuffle(cls->data(), cls->size());
    const size_t take = static_cast<size_t>(
        std::floor(fraction * static_cast<double>(cls->size())));
    for (size_t i = 0; i < cls->size(); ++i) {
      (i < take ? train_idx : val_idx).push_back((*cls)[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  for (int i : train_idx) train.samples.push_back(dataset.samples[static_cast<size_t>(i)]);
  for (int i : val_idx) val.samples.push_back(dataset.samples[static_cast<size_t>(i)]);
  return {std::move(train), std::move(val)};
}

std::vector<PairSample> make_pairs(const std::vector<uint8_t>& labels) {
  const int n = static_cast<int>(labels.size());
  std::vector<PairSample> pairs;
  if (n < 2) return pairs;
  pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      pairs.push_back({i, j, labels[static_cast<size_t>(i)] ==
                                 labels[static_cast<size_t>(j)]});
    }
  }
  return pairs;
}

Tensor dataset_tensor(const Dataset& ds, const std::vector<int>& indices) {
  std::vector<const float*> ptrs;
  ptrs.reserve(indices.size());
  for (int i : indices) {
    ptrs.push_back(ds.samples[static_cast<size_t>(i)].pixels.data());
  }
  return batch_to_tensor(ptrs, ds.spec.image_size);
}

Tensor dataset_tensor(const Dataset& ds) {
  std::vector<int> idx(ds.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  return dataset_tensor(ds, idx);
}

std::vector<uint8_t> dataset_labels(const Dataset& ds) {
  std::vector<uint8_t> out;
  out.reserve(ds.samples.size());
  for (const LabeledImage& s : ds.samples) {
    out.push_back(static_cast<uint8_t>(s.label));
  }
  return out;
}

std::vector<double> predict_dataset(const ModelParams& model,
                                    const Dataset& ds) {
  constexpr int kChunk = 64;
  std::vector<double> probs;
  probs.reserve(ds.samples.size());
  const int n = static_cast<int>(ds.samples.size());
  for (int start = 0; start < n; start += kChunk) {
    std::vector<int> idx;
    for (int i = start; i < std::min(start + kChunk, n); ++i) idx.push_back(i);
    const std::vector<double> chunk =
        predict_probabilities(model, dataset_tensor(ds, idx));
    probs.insert(probs.end(), chunk.begin(), chunk.end());
  }
  return probs;
}

double accuracy(const std::vector<double>& probs,
                const std::vector<uint8_t>& labels, double threshold) {
  require(probs.size() == labels.size(), ErrorKind::kArgument,
          "accuracy: size mismatch");
  int64_t correct = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= threshold ? 1 : 0;
    if (pred == static_cast<int>(labels[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(probs.size());
}

std::vector<unsigned char> encoder_bytes(const EncoderParams& p) {
  std::vector<unsigned char> bytes;
  for (const Tensor* t : p.tensors()) {
    const size_t sz = static_cast<size_t>(t->numel()) * sizeof(double);
    const size_t off = bytes.size();
    bytes.resize(off + sz);
    std::memcpy(bytes.data() + off, t->data(), sz);
  }
  return bytes;
}

TrainedModel train_ce(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg) {
  cfg.validate();
  require(cfg.loss == LossKind::kCe, ErrorKind::kArgument,
          "train_ce requires cfg.loss == CE");
  ModelParams params{EncoderParams::init(mix64(cfg.seed, hash64("ce-enc"))),
                     ClassifierParams::init(mix64(cfg.seed, hash64("ce-cls")))};
  const std::vector<uint8_t> train_labels = dataset_labels(train);
  const std::vector<uint8_t> val_labels = dataset_labels(val);
  const Tensor val_images = dataset_tensor(val);

  std::vector<Tensor*> param_ptrs = params.encoder.tensors();
  for (Tensor* t : params.classifier.tensors()) param_ptrs.push_back(t);
  AdamState adam(AdamConfig{cfg.lr}, param_ptrs);
  Rng order_rng(mix64(cfg.seed, hash64("ce-batch-order")));

  TrainedModel model;
  model.pipeline = "ce";
  model.seed = cfg.seed;
  model.best = params;
  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<int> order(train.samples.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order.data(), order.size());
    double epoch_loss = 0.0;
    int64_t seen = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const std::vector<int> batch(order.begin() + static_cast<int64_t>(start),
                                   order.begin() + static_cast<int64_t>(stop));
      try {
        Tape tape;
        const EncoderNodes enc = stage_encoder(tape, params.encoder, true);
        const ClassifierNodes cls =
            stage_classifier(tape, params.classifier, true);
        const NodeId x = tape.leaf(dataset_tensor(train, batch), false);
        const NodeId p =
            classifier_forward(tape, cls, encoder_forward(tape, enc, x));
        const NodeId loss =
            mean(tape, bce(tape, p, labels_column(train_labels, batch)));
        epoch_loss += tape.value(loss).item() * static_cast<double>(batch.size());
        seen += static_cast<int64_t>(batch.size());
        tape.backward(loss);
        std::vector<NodeId> nodes = {enc.conv1_w, enc.conv1_b, enc.conv2_w,
                                     enc.conv2_b, enc.fc1_w,   enc.fc1_b,
                                     enc.fc2_w,   enc.fc2_b,   cls.fc_w,
                                     cls.fc_b};
        adam.step(param_ptrs, collect_grads(tape, nodes));
      } catch (const Error& e) {
        abort_run("ce", epoch, static_cast<int>(start / cfg.batch_size), e);
      }
    }
    const CeEval val_eval = evaluate_ce(params, val_images, val_labels);
    model.history.push_back(EpochStats{
        epoch_loss / static_cast<double>(seen), val_eval.loss, val_eval.acc});
    // best validation accuracy; ties resolve to the lower validation loss,
    // then to the earlier epoch
    if (val_eval.acc > best_acc ||
        (val_eval.acc == best_acc && val_eval.loss < best_loss)) {
      best_acc = val_eval.acc;
      best_loss = val_eval.loss;
      model.best = params;
      model.best_epoch = epoch;
    }
  }
  model.final_params = params;
  if (cfg.epochs == 0) model.best = params;
  return model;
}

Stage1Result train_contrastive(const Dataset& train, const Dataset& val,
                               const TrainConfig& cfg) {
  cfg.validate();
  require(cfg.loss == LossKind::kContrastive, ErrorKind::kArgument,
          "train_contrastive requires cfg.loss == Contrastive");
  EncoderParams enc_params =
      EncoderParams::init(mix64(cfg.seed, hash64("siamese-enc")));
  const std::vector<uint8_t> train_labels = dataset_labels(train);
  const std::vector<uint8_t> val_labels = dataset_labels(val);
  const Tensor val_images = dataset_tensor(val);

  std::vector<Tensor*> param_ptrs = enc_params.tensors();
  AdamState adam(AdamConfig{cfg.lr}, param_ptrs);
  Rng order_rng(mix64(cfg.seed, hash64("siamese-batch-order")));

  Stage1Result result;
  result.best = enc_params;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<int> order(train.samples.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order.data(), order.size());
    double epoch_loss = 0.0;
    int64_t pair_count = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const std::vector<int> batch(order.begin() + static_cast<int64_t>(start),
                                   order.begin() + static_cast<int64_t>(stop));
      std::vector<uint8_t> batch_labels;
      for (int i : batch) batch_labels.push_back(train_labels[static_cast<size_t>(i)]);
      std::vector<PairSample> pairs = make_pairs(batch_labels);
      if (pairs.empty()) {
        std::cerr << "[oodlab] warning: batch of " << batch.size()
                  << " has no pairs, skipped\n";
        continue;
      }
      try {
        Tape tape;
        const EncoderNodes enc = stage_encoder(tape, enc_params, true);
        const NodeId x = tape.leaf(dataset_tensor(train, batch), false);
        const NodeId emb = encoder_forward(tape, enc, x);
        const int64_t npairs = static_cast<int64_t>(pairs.size());
        const NodeId loss =
            contrastive_mean(tape, emb, std::move(pairs), cfg.margin);
        epoch_loss += tape.value(loss).item() * static_cast<double>(npairs);
        pair_count += npairs;
        tape.backward(loss);
        std::vector<NodeId> nodes = {enc.conv1_w, enc.conv1_b, enc.conv2_w,
                                     enc.conv2_b, enc.fc1_w,   enc.fc1_b,
                                     enc.fc2_w,   enc.fc2_b};
        adam.step(param_ptrs, collect_grads(tape, nodes));
      } catch (const Error& e) {
        abort_run("contrastive", epoch, static_cast<int>(start / cfg.batch_size),
                  e);
      }
    }
    const double val_loss =
        evaluate_pair_loss(enc_params, val_images, val_labels, cfg.margin);
    result.history.push_back(
        EpochStats{epoch_loss / static_cast<double>(std::max<int64_t>(1, pair_count)),
                   val_loss, kNan});
    if (val_loss < best_loss) {
      best_loss = val_loss;
      result.best = enc_params;
      result.best_epoch = epoch;
    }
  }
  result.final_params = enc_params;
  if (cfg.epochs == 0) result.best = enc_params;
  return result;
}

TrainedModel train_head(const EncoderParams& frozen_encoder,
                        const Dataset& train, const Dataset& val,
                        const TrainConfig& cfg) {
  cfg.validate();
  const std::vector<unsigned char> before = encoder_bytes(frozen_encoder);

  // The encoder never enters the optimizer, so its embeddings are fixed and
  // can be computed once.
  Tensor train_emb = encode(frozen_encoder, dataset_tensor(train));
  Tensor val_emb = encode(frozen_encoder, dataset_tensor(val));
  const std::vector<uint8_t> train_labels = dataset_labels(train);
  const std::vector<uint8_t> val_labels = dataset_labels(val);

  // Precondition the probe: train on train-mean-centered features, then fold
  // the centering constant back into the stored bias (w.(e-c)+b = w.e+(b-w.c)).
  // The contrastive loss is translation-invariant, so stage-1 leaves the
  // cluster midpoint wherever init drift put it; without centering the bias
  // would have to travel that offset within its lr*steps Adam budget.
  std::vector<double> center(static_cast<size_t>(kEmbeddingDim), 0.0);
  for (int64_t i = 0; i < train_emb.dim(0); ++i) {
    for (int64_t j = 0; j < kEmbeddingDim; ++j) {
      center[static_cast<size_t>(j)] += train_emb[i * kEmbeddingDim + j];
    }
  }
  for (double& c : center) c /= static_cast<double>(train_emb.dim(0));
  for (Tensor* emb : {&train_emb, &val_emb}) {
    for (int64_t i = 0; i < emb->dim(0); ++i) {
      for (int64_t j = 0; j < kEmbeddingDim; ++j) {
        (*emb)[i * kEmbeddingDim + j] -= center[static_cast<size_t>(j)];
      }
    }
  }
  auto folded = [&center](const ClassifierParams& p) {
    ClassifierParams out = p;
    double shift = 0.0;
    for (int64_t j = 0; j < kEmbeddingDim; ++j) {
      shift += p.fc_w[j] * center[static_cast<size_t>(j)];
    }
    out.fc_b[0] = p.fc_b[0] - shift;
    return out;
  };

  ClassifierParams cls_params =
      ClassifierParams::init(mix64(cfg.seed, hash64("head-cls")));
  std::vector<Tensor*> param_ptrs = cls_params.tensors();
  AdamState adam(AdamConfig{cfg.lr}, param_ptrs);
  Rng order_rng(mix64(cfg.seed, hash64("head-batch-order")));

  TrainedModel model;
  model.pipeline = "contrastive";
  model.seed = cfg.seed;
  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();

  const int64_t n = train_emb.dim(0);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  auto gather = [](const Tensor& emb, const std::vector<int>& idx) {
    Tensor out({static_cast<int64_t>(idx.size()), kEmbeddingDim});
    for (size_t i = 0; i < idx.size(); ++i) {
      std::memcpy(out.data() + static_cast<int64_t>(i) * kEmbeddingDim,
                  emb.data() + static_cast<int64_t>(idx[i]) * kEmbeddingDim,
                  sizeof(double) * kEmbeddingDim);
    }
    return out;
  };

  auto eval_head = [&](const Tensor& emb, const std::vector<uint8_t>& labels) {
    Tape tape;
    const ClassifierNodes cls = stage_classifier(tape, cls_params, false);
    const NodeId e = tape.leaf(emb, false);
    const Tensor& pv = tape.value(classifier_forward(tape, cls, e));
    CeEval ev;
    std::vector<double> probs(static_cast<size_t>(pv.numel()));
    for (int64_t i = 0; i < pv.numel(); ++i) probs[static_cast<size_t>(i)] = pv[i];
    for (size_t i = 0; i < labels.size(); ++i) ev.loss += ce_loss(probs[i], labels[i]);
    ev.loss /= static_cast<double>(labels.size());
    ev.acc = accuracy(probs, labels);
    return ev;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order.data(), order.size());
    double epoch_loss = 0.0;
    int64_t seen = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const std::vector<int> batch(order.begin() + static_cast<int64_t>(start),
                                   order.begin() + static_cast<int64_t>(stop));
      try {
        Tape tape;
        const ClassifierNodes cls = stage_classifier(tape, cls_params, true);
        const NodeId e = tape.leaf(gather(train_emb, batch), false);
        const NodeId p = classifier_forward(tape, cls, e);
        const NodeId loss =
            mean(tape, bce(tape, p, labels_column(train_labels, batch)));
        epoch_loss += tape.value(loss).item() * static_cast<double>(batch.size());
        seen += static_cast<int64_t>(batch.size());
        tape.backward(loss);
        adam.step(param_ptrs, collect_grads(tape, {cls.fc_w, cls.fc_b}));
      } catch (const Error& e) {
        abort_run("head", epoch, static_cast<int>(start / cfg.batch_size), e);
      }
    }
    const CeEval val_eval = eval_head(val_emb, val_labels);
    model.history.push_back(EpochStats{
        epoch_loss / static_cast<double>(seen), val_eval.loss, val_eval.acc});
    if (val_eval.acc > best_acc ||
        (val_eval.acc == best_acc && val_eval.loss < best_loss)) {
      best_acc = val_eval.acc;
      best_loss = val_eval.loss;
      model.best.classifier = folded(cls_params);
      model.best_epoch = epoch;
    }
  }
  model.best.encoder = frozen_encoder;
  model.final_params.encoder = frozen_encoder;
  model.final_params.classifier = folded(cls_params);
  if (cfg.epochs == 0) model.best.classifier = folded(cls_params);

  require(encoder_bytes(frozen_encoder) == before, ErrorKind::kInternal,
          "frozen encoder mutated during head training");
  return model;
}

TrainedModel train_pipeline(const Dataset& train, const Dataset& val,
                            const TrainConfig& cfg) {
  if (cfg.loss == LossKind::kCe) return train_ce(train, val, cfg);
  Stage1Result stage1 = train_contrastive(train, val, cfg);
  TrainConfig head_cfg = cfg;
  head_cfg.loss = LossKind::kCe;
  TrainedModel model = train_head(stage1.best, train, val, head_cfg);
  model.pipeline = "contrastive";
  model.stage1_history = std::move(stage1.history);
  model.stage1_best_epoch = stage1.best_epoch;
  return model;
}

}  // namespace oodlab
