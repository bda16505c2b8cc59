// corpus/mix.h

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

#ifndef DFLS_CORPUS_MIX_H_
#define DFLS_CORPUS_MIX_H_

#include "dsp/features.h"
#include "util/rng.h"

namespace dfls {
namespace corpus {

struct MixResult {
  dsp::Waveform mixed;
  double achieved_snr_db = 0.0;
  double noise_scale = 1.0;
};

// Mask of samples belonging to active-speech blocks (10 ms blocks whose
// energy is within 30 dB of the loudest block). SNR targets are defined
// over this region.
std::vector<bool> active_speech_mask(const dsp::Waveform& speech);

// Scales noise so that 10*log10(P_speech/P_noise) == target over the
// active-speech region. Noise shorter than the speech is loop-tiled,
// longer noise is cropped. The achieved SNR is recomputed from the scaled
// noise rather than echoed back.
MixResult mix_at_snr(const dsp::Waveform& speech, const dsp::Waveform& noise,
                     double target_snr_db);

// Full linear convolution (FFT-based), trimmed to the speech length and
// peak-normalized to the input peak.
dsp::Waveform convolve_rir(const dsp::Waveform& speech, const dsp::Waveform& rir);

// Direct-path impulse followed by Gaussian noise under an
// exp(-6.9 t / rt60) envelope (60 dB decay at t = rt60).
dsp::Waveform synth_rir(double rt60_s, double length_s, uint64_t seed,
                        int sample_rate = 16000);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_MIX_H_
