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

#ifndef OODLAB_CORE_ADAM_HPP_
#define OODLAB_CORE_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"

namespace oodlab {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moment buffers mirror the parameter shapes; the step
// counter is strictly increasing.
class AdamState {
 public:
  AdamState(AdamConfig config, const std::vector<Tensor*>& params);

  // In-place update of `params` from `grads`; both must line up with the
  // shapes this state was built from.
  void step(const std::vector<Tensor*>& params,
            const std::vector<const Tensor*>& grads);

  int64_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  int64_t t_ = 0;
};

}  // namespace oodlab

#endif  // OODLAB_CORE_ADAM_HPP_
