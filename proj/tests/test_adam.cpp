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

#include <cmath>

#include "core/adam.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace oodlab;
using namespace oodlab::testutil;

TEST_CASE("zero gradients leave parameters unchanged") {
  Tensor p({4}, {1.0, -2.0, 3.0, 0.5});
  const Tensor zero({4});
  const std::vector<double> before(p.data(), p.data() + 4);
  AdamState adam(AdamConfig{}, {&p});
  for (int i = 0; i < 3; ++i) adam.step({&p}, {&zero});
  for (int64_t i = 0; i < 4; ++i) CHECK(p[i] == before[static_cast<size_t>(i)]);
  CHECK(adam.steps() == 3);
}

TEST_CASE("first step matches the closed form -lr*g/(|g|+eps)") {
  Rng rng(7);
  Tensor p = random_tensor({16}, rng);
  Tensor g = random_tensor({16}, rng, -2.0, 2.0);
  const std::vector<double> before(p.data(), p.data() + 16);
  AdamConfig cfg;
  cfg.lr = 1e-4;
  AdamState adam(cfg, {&p});
  adam.step({&p}, {&g});
  for (int64_t i = 0; i < 16; ++i) {
    const double want =
        -cfg.lr * g[i] / (std::abs(g[i]) + cfg.epsilon);
    const double got = p[i] - before[static_cast<size_t>(i)];
    CHECK(rel_err(got, want, 1e-12) < 1e-6);
    // which is approximately -lr * sign(g)
    CHECK(std::abs(got + cfg.lr * (g[i] > 0 ? 1.0 : -1.0)) < 1e-8);
  }
}

TEST_CASE("identical (params, grads, state) produce identical output") {
  Rng rng(8);
  const Tensor g = random_tensor({8}, rng);
  auto run = [&]() {
    Tensor p = Tensor::full({8}, 0.25);
    AdamState adam(AdamConfig{}, {&p});
    for (int i = 0; i < 5; ++i) adam.step({&p}, {&g});
    return std::vector<double>(p.data(), p.data() + 8);
  };
  CHECK(run() == run());
}

TEST_CASE("convergence on a quadratic bowl") {
  // minimize 0.5*||x - c||^2 with exact gradients
  Tensor x({3}, {5.0, -4.0, 2.0});
  const Tensor c({3}, {1.0, 2.0, -1.0});
  AdamConfig cfg;
  cfg.lr = 0.05;
  AdamState adam(cfg, {&x});
  for (int i = 0; i < 2000; ++i) {
    Tensor g({3});
    for (int64_t j = 0; j < 3; ++j) g[j] = x[j] - c[j];
    adam.step({&x}, {&g});
  }
  for (int64_t j = 0; j < 3; ++j) CHECK(std::abs(x[j] - c[j]) < 1e-2);
}

TEST_CASE("shape mismatch is rejected") {
  Tensor p({4});
  Tensor g({5});
  AdamState adam(AdamConfig{}, {&p});
  CHECK_THROWS_AS(adam.step({&p}, {&g}), Error);
}
