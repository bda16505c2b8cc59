// dsp/fft.h

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

#ifndef DFLS_DSP_FFT_H_
#define DFLS_DSP_FFT_H_

#include <complex>
#include <vector>

namespace dfls {
namespace dsp {

// In-place iterative radix-2 FFT. Length must be a power of two; the
// front-end only ever needs 512, so a dependency-free implementation
// beats linking a full FFT library here.
void fft(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace dsp
}  // namespace dfls

#endif  // DFLS_DSP_FFT_H_
