// ndgrad/checkpoint.h

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

#ifndef DFLS_NDGRAD_CHECKPOINT_H_
#define DFLS_NDGRAD_CHECKPOINT_H_

#include <string>

#include "ndgrad/param_store.h"

namespace dfls {
namespace ndgrad {

// Checkpoint file layout (little-endian):
//   magic "DFLS" | u32 version (=1) | u32 tensor count
//   per tensor: u32 name length | UTF-8 name | u32 rank | u64 extents[rank]
//               | float32 data, row-major
// Values are stored as 32-bit floats regardless of in-memory precision.
template <typename Real>
void save_checkpoint(const ParamStore<Real>& params, const std::string& path);

template <typename Real>
ParamStore<Real> load_checkpoint(const std::string& path);

}  // namespace ndgrad
}  // namespace dfls

#endif  // DFLS_NDGRAD_CHECKPOINT_H_
