// ndgrad/optim.h

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

#ifndef DFLS_NDGRAD_OPTIM_H_
#define DFLS_NDGRAD_OPTIM_H_

#include <map>
#include <string>

#include "ndgrad/param_store.h"

namespace dfls {
namespace ndgrad {

// Base rate with per-epoch exponential decay and optional linear warmup
// over the first `warmup_steps` global steps (step 1 gets base/warmup).
struct LrSchedule {
  double base_rate = 1e-3;
  double decay_per_epoch = 0.5;
  int warmup_steps = 0;

  double rate(int64_t step, int epoch) const;
};

template <typename Real>
struct OptimState {
  LrSchedule schedule;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::map<std::string, Tensor<Real>> m;  // first moments
  std::map<std::string, Tensor<Real>> v;  // second moments
};

// One Adam update over every parameter in the store using the gradients
// currently held there. `epoch` selects the decayed rate.
template <typename Real>
void adam_step(ParamStore<Real>& params, OptimState<Real>& state, int epoch);

}  // namespace ndgrad
}  // namespace dfls

#endif  // DFLS_NDGRAD_OPTIM_H_
