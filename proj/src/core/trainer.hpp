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

#ifndef OODLAB_CORE_TRAINER_HPP_
#define OODLAB_CORE_TRAINER_HPP_

// The two training pipelines: (a) end-to-end cross-entropy, and (b/c)
// siamese contrastive pretraining followed by a CE head over the frozen
// encoder. A single run is single-threaded and a pure function of
// (config, data, seed).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/autodiff.hpp"
#include "core/nnmodels.hpp"
#include "core/synthgen.hpp"

namespace oodlab {

enum class LossKind : uint8_t { kCe = 0, kContrastive = 1 };

const char* to_string(LossKind k);
LossKind loss_from_string(const std::string& s);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-4;
  double split_fraction = 0.85;
  int n_train_pool = 200;
  int n_test = 200;
  uint64_t seed = 1;
  LossKind loss = LossKind::kCe;
  double margin = 1.0;  // contrastive only

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;  // NaN for the contrastive pretraining stage
};

struct TrainedModel {
  std::string pipeline;  // "ce" | "contrastive"
  ModelParams best;      // checkpoint selected on validation
  ModelParams final_params;
  int best_epoch = -1;
  std::vector<EpochStats> history;          // CE / stage-2 head history
  std::vector<EpochStats> stage1_history;   // contrastive pipeline only
  int stage1_best_epoch = -1;
  uint64_t seed = 0;
};

struct Stage1Result {
  EncoderParams best;
  EncoderParams final_params;
  int best_epoch = -1;
  std::vector<EpochStats> history;
};

// Stratified, seeded, disjoint split preserving exact class balance.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  uint64_t seed);

// All unordered within-batch pairs; the same_class flag is label equality.
// Fewer than two labels yields an empty list (callers skip with a warning).
std::vector<PairSample> make_pairs(const std::vector<uint8_t>& labels);

TrainedModel train_ce(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg);

Stage1Result train_contrastive(const Dataset& train, const Dataset& val,
                               const TrainConfig& cfg);

// Trains only the classifier over the frozen encoder; the encoder is
// asserted bit-identical before and after.
TrainedModel train_head(const EncoderParams& frozen_encoder,
                        const Dataset& train, const Dataset& val,
                        const TrainConfig& cfg);

// Dispatches to the CE pipeline or the two-stage contrastive pipeline.
TrainedModel train_pipeline(const Dataset& train, const Dataset& val,
                            const TrainConfig& cfg);

// ---- Shared helpers ----

Tensor dataset_tensor(const Dataset& ds, const std::vector<int>& indices);
Tensor dataset_tensor(const Dataset& ds);
std::vector<uint8_t> dataset_labels(const Dataset& ds);

// Chunked forward pass over a whole dataset.
std::vector<double> predict_dataset(const ModelParams& model,
                                    const Dataset& ds);

double accuracy(const std::vector<double>& probs,
                const std::vector<uint8_t>& labels, double threshold = 0.5);

// Byte image of a parameter set, used for bit-equality freeze checks.
std::vector<unsigned char> encoder_bytes(const EncoderParams& p);

}  // namespace oodlab

#endif  // OODLAB_CORE_TRAINER_HPP_
