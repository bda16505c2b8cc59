// ndgrad/param_store.h

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

#ifndef DFLS_NDGRAD_PARAM_STORE_H_
#define DFLS_NDGRAD_PARAM_STORE_H_

#include <map>
#include <string>
#include <vector>

#include "ndgrad/graph.h"
#include "ndgrad/tensor.h"
#include "util/rng.h"

namespace dfls {
namespace ndgrad {

// Named parameter tensors with matching gradient buffers. Iteration order
// is lexicographic, which keeps optimizer updates deterministic.
template <typename Real>
class ParamStore {
 public:
  Tensor<Real>& create(const std::string& name, std::vector<int64_t> shape);
  // Kaiming-uniform fan-in init; the stream is derived from (seed, name),
  // so init does not depend on creation order.
  Tensor<Real>& create_kaiming(const std::string& name, std::vector<int64_t> shape,
                               int64_t fan_in, uint64_t seed);
  Tensor<Real>& create_gauss(const std::string& name, std::vector<int64_t> shape,
                             double stddev, uint64_t seed);
  Tensor<Real>& create_const(const std::string& name, std::vector<int64_t> shape, Real v);

  bool has(const std::string& name) const { return entries_.count(name) > 0; }
  Tensor<Real>& value(const std::string& name);
  const Tensor<Real>& value(const std::string& name) const;
  Tensor<Real>& grad(const std::string& name);

  std::vector<std::string> names() const;
  size_t size() const { return entries_.size(); }
  int64_t num_scalars() const;

  void zero_grads();

  // Binds a parameter into a graph: trainable => gradient flows back into
  // this store; frozen => plain constant.
  typename ParamGraph<Real>::NodeId bind(ParamGraph<Real>& g, const std::string& name,
                                         bool trainable);

  // Flat copy of all parameter values (name-sorted), for freeze checks.
  std::vector<Real> flatten() const;

  template <typename Other>
  ParamStore<Other> cast() const {
    ParamStore<Other> out;
    for (const auto& [name, e] : entries_) {
      out.create(name, e.value.shape());
      out.value(name) = e.value.template cast<Other>();
    }
    return out;
  }

 private:
  struct Entry {
    Tensor<Real> value;
    Tensor<Real> grad;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace ndgrad
}  // namespace dfls

#endif  // DFLS_NDGRAD_PARAM_STORE_H_
