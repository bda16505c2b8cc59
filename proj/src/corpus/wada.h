// corpus/wada.h

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

#ifndef DFLS_CORPUS_WADA_H_
#define DFLS_CORPUS_WADA_H_

#include <cstdint>
#include <vector>

#include "dsp/features.h"
#include "util/rng.h"

namespace dfls {
namespace corpus {

// Waveform-amplitude-distribution SNR estimation: speech amplitudes are
// modeled as Gamma(0.4), noise as Gaussian. The scale-invariant statistic
//   S(x) = ln(E|x|) - E[ln|x|]
// decreases monotonically from its Gamma value toward its Gaussian value
// as noise takes over; a calibrated lookup curve inverts it.

double wada_statistic(const std::vector<double>& samples);

// One zero-mean sample whose amplitude is Gamma(0.4)-distributed, scaled
// to unit power. Used for calibration and as the test oracle's speech
// model.
double gamma_speech_sample(Rng& rng);

constexpr double kWadaSpeechShape = 0.4;
constexpr double kWadaSnrMin = -20.0;
constexpr double kWadaSnrMax = 100.0;

struct WadaTable {
  std::vector<double> snr_db;  // ascending grid
  std::vector<double> stat;    // monotone nondecreasing
};

// Monte-Carlo calibration over a dB grid; monotonicity is enforced by a
// running max. Deterministic for a given seed.
WadaTable calibrate_wada_table(int samples_per_point = 200000, double step_db = 1.0,
                               uint64_t seed = 0x57414441ull);

// The process-wide calibrated curve (built lazily, fixed seed).
const WadaTable& wada_table();

// Interpolated inverse lookup of the statistic, clamped to
// [kWadaSnrMin, kWadaSnrMax].
double snr_from_statistic(double stat, const WadaTable& table);

// Requires at least 0.5 s of non-silent audio.
double estimate_snr(const dsp::Waveform& w);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_WADA_H_
