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

#include "core/adam.hpp"

#include <cmath>

#include "core/error.hpp"

namespace oodlab {

AdamState::AdamState(AdamConfig config, const std::vector<Tensor*>& params)
    : config_(config) {
  require(config_.lr > 0.0, ErrorKind::kArgument, "adam: lr must be positive");
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor* p : params) {
    m_.push_back(Tensor::zeros(p->shape()));
    v_.push_back(Tensor::zeros(p->shape()));
  }
}

void AdamState::step(const std::vector<Tensor*>& params,
                     const std::vector<const Tensor*>& grads) {
  require(params.size() == m_.size() && grads.size() == m_.size(),
          ErrorKind::kArgument, "adam: parameter/gradient count mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    require(p.same_shape(m_[i]) && g.same_shape(m_[i]), ErrorKind::kArgument,
            "adam: shape mismatch at parameter " + std::to_string(i));
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (int64_t j = 0; j < p.numel(); ++j) {
      const double gj = g[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * gj;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
    p.ensure_finite("adam_step");
  }
}

}  // namespace oodlab
