// dsp/feature_io.h

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

#ifndef DFLS_DSP_FEATURE_IO_H_
#define DFLS_DSP_FEATURE_IO_H_

#include <string>

#include "dsp/features.h"

namespace dfls {
namespace dsp {

// Feature file layout (little-endian):
//   magic "FEAT" | u32 version (=1) | u32 D | u32 T | u8 kind
//   | float32 data, row-major D x T
void save_features(const FeatureMatrix& f, const std::string& path);
FeatureMatrix load_features(const std::string& path);

}  // namespace dsp
}  // namespace dfls

#endif  // DFLS_DSP_FEATURE_IO_H_
