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

#ifndef OODLAB_CORE_TENSOR_HPP_
#define OODLAB_CORE_TENSOR_HPP_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace oodlab {

using Shape = std::vector<int64_t>;

// Dense row-major float64 array. Values are immutable once a tensor has been
// handed to the tape; ops always allocate fresh outputs.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);
  Tensor(Shape shape, std::initializer_list<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value) { return Tensor({1}, {value}); }

  const Shape& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  int64_t dim(int64_t i) const { return shape_[static_cast<size_t>(i)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // Scalar value of a one-element tensor.
  double item() const;

  Tensor reshaped(Shape shape) const;

  void fill(double value);

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Throws Error(kInternal) if any element is NaN or infinite.
  void ensure_finite(const char* what) const;

  static std::string shape_str(const Shape& s);

 private:
  Shape shape_;
  std::vector<double> data_;
};

int64_t shape_numel(const Shape& shape);

}  // namespace oodlab

#endif  // OODLAB_CORE_TENSOR_HPP_
