// ndgrad/param_store.cc

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

#include "ndgrad/param_store.h"

#include <cmath>

namespace dfls {
namespace ndgrad {

template <typename Real>
Tensor<Real>& ParamStore<Real>::create(const std::string& name,
                                       std::vector<int64_t> shape) {
  require(!has(name), strcat_("param '", name, "' already exists"));
  Entry e;
  e.value = Tensor<Real>(shape);
  e.grad = Tensor<Real>(shape);
  auto [it, ok] = entries_.emplace(name, std::move(e));
  (void)ok;
  return it->second.value;
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::create_kaiming(const std::string& name,
                                               std::vector<int64_t> shape,
                                               int64_t fan_in, uint64_t seed) {
  Tensor<Real>& v = create(name, std::move(shape));
  require(fan_in >= 1, "create_kaiming: fan_in must be >= 1");
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Rng rng = Rng::stream(seed, name);
  for (int64_t i = 0; i < v.numel(); ++i)
    v[i] = static_cast<Real>(rng.uniform(-bound, bound));
  return v;
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::create_gauss(const std::string& name,
                                             std::vector<int64_t> shape, double stddev,
                                             uint64_t seed) {
  Tensor<Real>& v = create(name, std::move(shape));
  Rng rng = Rng::stream(seed, name);
  for (int64_t i = 0; i < v.numel(); ++i)
    v[i] = static_cast<Real>(stddev * rng.gauss());
  return v;
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::create_const(const std::string& name,
                                             std::vector<int64_t> shape, Real c) {
  Tensor<Real>& v = create(name, std::move(shape));
  v.fill(c);
  return v;
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::value(const std::string& name) {
  auto it = entries_.find(name);
  require(it != entries_.end(), strcat_("unknown param '", name, "'"));
  return it->second.value;
}

template <typename Real>
const Tensor<Real>& ParamStore<Real>::value(const std::string& name) const {
  auto it = entries_.find(name);
  require(it != entries_.end(), strcat_("unknown param '", name, "'"));
  return it->second.value;
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::grad(const std::string& name) {
  auto it = entries_.find(name);
  require(it != entries_.end(), strcat_("unknown param '", name, "'"));
  return it->second.grad;
}

template <typename Real>
std::vector<std::string> ParamStore<Real>::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

template <typename Real>
int64_t ParamStore<Real>::num_scalars() const {
  int64_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.numel();
  return n;
}

template <typename Real>
void ParamStore<Real>::zero_grads() {
  for (auto& [name, e] : entries_) e.grad.fill(Real(0));
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamStore<Real>::bind(ParamGraph<Real>& g,
                                                         const std::string& name,
                                                         bool trainable) {
  auto it = entries_.find(name);
  require(it != entries_.end(), strcat_("unknown param '", name, "'"));
  if (trainable) return g.param(it->second.value, &it->second.grad);
  return g.constant(it->second.value);
}

template <typename Real>
std::vector<Real> ParamStore<Real>::flatten() const {
  std::vector<Real> out;
  for (const auto& [name, e] : entries_)
    out.insert(out.end(), e.value.data(), e.value.data() + e.value.numel());
  return out;
}

template class ParamStore<float>;
template class ParamStore<double>;

}  // namespace ndgrad
}  // namespace dfls
