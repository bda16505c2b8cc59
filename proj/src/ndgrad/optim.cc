// ndgrad/optim.cc

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

#include "ndgrad/optim.h"

#include <cmath>

namespace dfls {
namespace ndgrad {

double LrSchedule::rate(int64_t step, int epoch) const {
  double lr = base_rate * std::pow(decay_per_epoch, epoch);
  if (warmup_steps > 0 && step <= warmup_steps)
    lr *= static_cast<double>(step) / static_cast<double>(warmup_steps);
  return lr;
}

template <typename Real>
void adam_step(ParamStore<Real>& params, OptimState<Real>& state, int epoch) {
  state.step += 1;
  double lr = state.schedule.rate(state.step, epoch);
  double b1 = state.beta1, b2 = state.beta2;
  double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (const std::string& name : params.names()) {
    Tensor<Real>& p = params.value(name);
    Tensor<Real>& g = params.grad(name);
    auto mit = state.m.find(name);
    if (mit == state.m.end()) {
      state.m.emplace(name, Tensor<Real>(p.shape()));
      state.v.emplace(name, Tensor<Real>(p.shape()));
      mit = state.m.find(name);
    }
    Tensor<Real>& m = mit->second;
    Tensor<Real>& v = state.v.at(name);
    require(m.same_shape(p) && v.same_shape(p), "adam_step: moment shape mismatch");
    for (int64_t i = 0; i < p.numel(); ++i) {
      double gi = static_cast<double>(g[i]);
      double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
      double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
      m[i] = static_cast<Real>(mi);
      v[i] = static_cast<Real>(vi);
      double mhat = mi / bc1;
      double vhat = vi / bc2;
      p[i] = static_cast<Real>(static_cast<double>(p[i]) -
                               lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

template void adam_step<float>(ParamStore<float>&, OptimState<float>&, int);
template void adam_step<double>(ParamStore<double>&, OptimState<double>&, int);

}  // namespace ndgrad
}  // namespace dfls
