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

#include "core/tensor.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace oodlab {

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    require(d >= 0, ErrorKind::kArgument, "negative tensor dimension");
    n *= d;
  }
  return n;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<size_t>(shape_numel(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(shape_numel(shape_) == static_cast<int64_t>(data_.size()),
          ErrorKind::kArgument,
          "tensor data length does not match shape " + shape_str(shape_));
}

Tensor::Tensor(Shape shape, std::initializer_list<double> data)
    : Tensor(std::move(shape), std::vector<double>(data)) {}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

double Tensor::item() const {
  require(numel() == 1, ErrorKind::kArgument,
          "item() on tensor of shape " + shape_str(shape_));
  return data_[0];
}

Tensor Tensor::reshaped(Shape shape) const {
  require(shape_numel(shape) == numel(), ErrorKind::kArgument,
          "reshape " + shape_str(shape_) + " -> " + shape_str(shape) +
              " changes element count");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

void Tensor::ensure_finite(const char* what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kInternal,
           std::string("non-finite value produced by ") + what);
    }
  }
}

std::string Tensor::shape_str(const Shape& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ",";
    os << s[i];
  }
  os << ")";
  return os.str();
}

}  // namespace oodlab
