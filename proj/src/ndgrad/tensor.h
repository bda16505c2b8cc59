// ndgrad/tensor.h

// Copyright 2026  The DFLS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DFLS_NDGRAD_TENSOR_H_
#define DFLS_NDGRAD_TENSOR_H_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "util/common.h"

namespace dfls {
namespace ndgrad {

// Dense row-major tensor. Precision is a template parameter: double for
// gradient-check tests, float for training runs.
template <typename Real>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(numel_of(shape_)), Real(0));
  }

  Tensor(std::vector<int64_t> shape, std::vector<Real> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    require(static_cast<int64_t>(data_.size()) == numel_of(shape_),
            "Tensor: data size does not match shape");
  }

  static Tensor scalar(Real v) { return Tensor({1}, {v}); }

  static int64_t numel_of(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
      require(d >= 0, "Tensor: negative extent");
      n *= d;
    }
    return n;
  }

  const std::vector<int64_t>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }

  Real* data() { return data_.data(); }
  const Real* data() const { return data_.data(); }

  Real& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  Real operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // 2-D and 3-D accessors; row-major.
  Real& at(int64_t i, int64_t j) { return data_[static_cast<size_t>(i * shape_[1] + j)]; }
  Real at(int64_t i, int64_t j) const { return data_[static_cast<size_t>(i * shape_[1] + j)]; }
  Real& at(int64_t i, int64_t j, int64_t k) {
    return data_[static_cast<size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }
  Real at(int64_t i, int64_t j, int64_t k) const {
    return data_[static_cast<size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }

  void fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (Real v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  template <typename Other>
  Tensor<Other> cast() const {
    std::vector<Other> d(data_.size());
    for (size_t i = 0; i < data_.size(); ++i) d[i] = static_cast<Other>(data_[i]);
    return Tensor<Other>(shape_, std::move(d));
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<Real> data_;
};

}  // namespace ndgrad
}  // namespace dfls

#endif  // DFLS_NDGRAD_TENSOR_H_
