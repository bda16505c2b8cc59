// corpus/wav_io.h

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

#ifndef DFLS_CORPUS_WAV_IO_H_
#define DFLS_CORPUS_WAV_IO_H_

#include <string>

#include "dsp/features.h"

namespace dfls {
namespace corpus {

// Mono 16-bit PCM RIFF. Samples are scaled to [-1, 1); values outside
// that range are clipped on write (and the clip count is returned).
int64_t write_wav(const dsp::Waveform& w, const std::string& path);
dsp::Waveform read_wav(const std::string& path);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_WAV_IO_H_
