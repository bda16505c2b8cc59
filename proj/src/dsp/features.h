// dsp/features.h

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

#ifndef DFLS_DSP_FEATURES_H_
#define DFLS_DSP_FEATURES_H_

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "util/common.h"

namespace dfls {
namespace dsp {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Wide-band front end: 25 ms frames, 10 ms hop, 512-point FFT, Hann window.
struct StftConfig {
  int frame_len = 400;
  int hop = 160;
  int n_fft = 512;

  int64_t num_frames(int64_t n_samples) const {
    return 1 + (n_samples - frame_len) / hop;
  }
};

// Complex STFT, bins-by-frames.
struct Spectrogram {
  int64_t bins = 0;
  int64_t frames = 0;
  StftConfig cfg;
  std::vector<std::complex<double>> data;  // [bins][frames]

  std::complex<double>& at(int64_t b, int64_t t) {
    return data[static_cast<size_t>(b * frames + t)];
  }
  std::complex<double> at(int64_t b, int64_t t) const {
    return data[static_cast<size_t>(b * frames + t)];
  }
};

struct FeatureMatrix {
  enum class Kind : uint8_t { kLmfb = 0, kLogspec = 1 };

  int64_t dim = 0;
  int64_t frames = 0;
  Kind kind = Kind::kLmfb;
  bool normalized = false;
  std::vector<float> data;  // row-major [dim][frames]

  FeatureMatrix() = default;
  FeatureMatrix(int64_t d, int64_t t, Kind k)
      : dim(d), frames(t), kind(k), data(static_cast<size_t>(d * t), 0.0f) {}

  float& at(int64_t d, int64_t t) { return data[static_cast<size_t>(d * frames + t)]; }
  float at(int64_t d, int64_t t) const { return data[static_cast<size_t>(d * frames + t)]; }
};

Spectrogram stft(const Waveform& w, const StftConfig& cfg = {});

// Weighted overlap-add inverse with the same Hann window; reconstructs
// `n_samples` samples (the full span covered by the frames).
Waveform istft(const Spectrogram& spec, int64_t n_samples, int sample_rate = 16000);

// Triangular filters on the HTK mel scale mel(f) = 2595*log10(1+f/700),
// area-normalized so a flat power spectrum yields a flat response.
// Rows that would quantize to all-zero get unit weight at the bin nearest
// their center, so every row stays usable at high filter counts.
std::vector<double> mel_filterbank(int n_mels, int n_fft = 512, int fs = 16000,
                                   double fmin = 20.0, double fmax = 7600.0);

double hz_to_mel(double f);
double mel_to_hz(double m);

// log(max(melfb * |STFT|^2, 1e-10)), natural log. `normalized` is false.
FeatureMatrix logmelfb(const Waveform& w, int n_mels = 40);

// Log power of STFT bins 0..255.
FeatureMatrix logspec(const Waveform& w);

// Subtracts the per-dimension mean over a centered, edge-clipped window.
FeatureMatrix mean_normalize_online(const FeatureMatrix& f, int window = 301);

// Per-frame log energies (sum of STFT power over bins).
std::vector<float> frame_log_energies(const Waveform& w);

// Nearest-rank percentile, used for the corpus-level silence threshold.
float energy_percentile(std::vector<float> energies, double fraction);

// Drops frames with log energy <= threshold (x-vector path only). Keeps
// the input untouched if fewer than `min_frames` frames would survive.
FeatureMatrix drop_silent_frames(const FeatureMatrix& f,
                                 const std::vector<float>& log_energies,
                                 float threshold, int64_t min_frames);

constexpr double kLogFloor = 1e-10;

}  // namespace dsp
}  // namespace dfls

#endif  // DFLS_DSP_FEATURES_H_
