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

#ifndef OODLAB_CORE_AUTODIFF_HPP_
#define OODLAB_CORE_AUTODIFF_HPP_

// Reverse-mode differentiation over a single-use tape. A tape records one
// forward computation; nodes are appended in evaluation order, which is a
// topological order by construction, and backward() visits them exactly once
// in reverse. A tape is single-threaded; independent tapes are independent.

#include <cstdint>
#include <functional>
#include <vector>

#include "core/tensor.hpp"

namespace oodlab {

using NodeId = int32_t;

// One element of a dynamically formed batch pair list.
struct PairSample {
  int32_t first;
  int32_t second;
  bool same_class;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId leaf(Tensor value, bool requires_grad = false);

  const Tensor& value(NodeId id) const { return nodes_[check(id)].value; }
  bool needs_grad(NodeId id) const { return nodes_[check(id)].requires_grad; }
  int64_t size() const { return static_cast<int64_t>(nodes_.size()); }

  // Gradient accumulator; allocates a zero tensor on first access.
  Tensor& grad_buffer(NodeId id);

  // Gradient of the last backward() target w.r.t. node `id`. Zero tensor if
  // the node never received a contribution.
  const Tensor& grad(NodeId id) { return grad_buffer(id); }

  // Seeds d(loss)/d(loss) = 1 and propagates through all recorded nodes in
  // reverse. `loss` must hold exactly one element.
  void backward(NodeId loss);

  // Low-level append used by the op constructors below.
  using BackwardFn = std::function<void(Tape&, NodeId)>;
  NodeId append(const char* op, Tensor value, std::vector<NodeId> inputs,
                BackwardFn backward);

  const char* op_name(NodeId id) const { return nodes_[check(id)].op; }
  const std::vector<NodeId>& inputs_of(NodeId id) const {
    return nodes_[check(id)].inputs;
  }

 private:
  struct Node {
    const char* op;
    Tensor value;
    Tensor grad;  // empty until touched by backward
    std::vector<NodeId> inputs;
    bool requires_grad;
    BackwardFn backward;
  };

  size_t check(NodeId id) const;

  std::vector<Node> nodes_;
};

// ---- Forward ops. Each records one tape node and validates shapes. ----

// Elementwise sum of two same-shape tensors.
NodeId add(Tape& t, NodeId a, NodeId b);
// Row/channel bias broadcast: (N,M)+(M) or (N,C,H,W)+(C).
NodeId add_bias(Tape& t, NodeId x, NodeId bias);
// (N,K) x (K,M) -> (N,M).
NodeId matmul(Tape& t, NodeId a, NodeId b);
// Valid cross-correlation, stride 1: (N,C,H,W) * (F,C,KH,KW) -> (N,F,OH,OW).
NodeId conv2d(Tape& t, NodeId x, NodeId w);
// 2x2 window, stride 2; H and W must be even.
NodeId maxpool2x2(Tape& t, NodeId x);
NodeId avgpool2x2(Tape& t, NodeId x);
NodeId tanh_op(Tape& t, NodeId x);
NodeId sigmoid_op(Tape& t, NodeId x);
NodeId scale(Tape& t, NodeId x, double factor);
// (N, d1, d2, ...) -> (N, d1*d2*...).
NodeId flatten(Tape& t, NodeId x);
// Row-wise squared Euclidean distance: (N,D),(N,D) -> (N).
NodeId squared_euclidean(Tape& t, NodeId a, NodeId b);
NodeId sum(Tape& t, NodeId x);
NodeId mean(Tape& t, NodeId x);

// Per-element binary cross-entropy against constant targets in {0,1};
// probabilities are clamped to [1e-12, 1-1e-12] before the logs.
NodeId bce(Tape& t, NodeId p, Tensor targets);

// Mean contrastive loss over `pairs` of rows of the (N,D) embedding matrix:
// d^2 for same-class pairs, max(0, margin-d)^2 otherwise.
NodeId contrastive_mean(Tape& t, NodeId embeddings,
                        std::vector<PairSample> pairs, double margin);

constexpr double kProbClamp = 1e-12;

}  // namespace oodlab

#endif  // OODLAB_CORE_AUTODIFF_HPP_
