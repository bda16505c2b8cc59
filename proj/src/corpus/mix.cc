// corpus/mix.cc

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

#include "corpus/mix.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dsp/fft.h"

namespace dfls {
namespace corpus {

std::vector<bool> active_speech_mask(const dsp::Waveform& speech) {
  const int64_t block = speech.sample_rate / 100;  // 10 ms
  int64_t n = static_cast<int64_t>(speech.samples.size());
  require(n > 0, "active_speech_mask: empty input");
  int64_t n_blocks = (n + block - 1) / block;
  std::vector<double> energy(static_cast<size_t>(n_blocks), 0.0);
  double max_e = 0.0;
  for (int64_t b = 0; b < n_blocks; ++b) {
    double e = 0.0;
    int64_t lo = b * block, hi = std::min(n, lo + block);
    for (int64_t i = lo; i < hi; ++i)
      e += speech.samples[static_cast<size_t>(i)] * speech.samples[static_cast<size_t>(i)];
    e /= static_cast<double>(hi - lo);
    energy[static_cast<size_t>(b)] = e;
    max_e = std::max(max_e, e);
  }
  double thresh = max_e * 1e-3;  // 30 dB below the loudest block
  std::vector<bool> mask(static_cast<size_t>(n), false);
  for (int64_t b = 0; b < n_blocks; ++b) {
    if (energy[static_cast<size_t>(b)] <= thresh) continue;
    int64_t lo = b * block, hi = std::min(n, lo + block);
    for (int64_t i = lo; i < hi; ++i) mask[static_cast<size_t>(i)] = true;
  }
  return mask;
}

MixResult mix_at_snr(const dsp::Waveform& speech, const dsp::Waveform& noise,
                     double target_snr_db) {
  int64_t n = static_cast<int64_t>(speech.samples.size());
  require(n > 0, "mix_at_snr: empty speech");
  require(!noise.samples.empty(), "mix_at_snr: empty noise");
  // Loop-tile or crop the noise to the speech length.
  std::vector<double> tiled(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    tiled[static_cast<size_t>(i)] =
        noise.samples[static_cast<size_t>(i) % noise.samples.size()];

  std::vector<bool> mask = active_speech_mask(speech);
  double p_speech = 0.0, p_noise = 0.0;
  int64_t active = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (!mask[static_cast<size_t>(i)]) continue;
    p_speech += speech.samples[static_cast<size_t>(i)] * speech.samples[static_cast<size_t>(i)];
    p_noise += tiled[static_cast<size_t>(i)] * tiled[static_cast<size_t>(i)];
    ++active;
  }
  require(active > 0 && p_speech > 0.0, "mix_at_snr: zero-power speech");
  require(p_noise > 0.0, "mix_at_snr: zero-power noise over the active region");
  p_speech /= static_cast<double>(active);
  p_noise /= static_cast<double>(active);

  double scale = std::sqrt(p_speech / (p_noise * std::pow(10.0, target_snr_db / 10.0)));
  MixResult out;
  out.noise_scale = scale;
  out.mixed.sample_rate = speech.sample_rate;
  out.mixed.samples.resize(static_cast<size_t>(n));
  double p_scaled = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double nv = scale * tiled[static_cast<size_t>(i)];
    out.mixed.samples[static_cast<size_t>(i)] = speech.samples[static_cast<size_t>(i)] + nv;
    if (mask[static_cast<size_t>(i)]) p_scaled += nv * nv;
  }
  p_scaled /= static_cast<double>(active);
  out.achieved_snr_db = 10.0 * std::log10(p_speech / p_scaled);
  return out;
}

dsp::Waveform convolve_rir(const dsp::Waveform& speech, const dsp::Waveform& rir) {
  require(!rir.samples.empty(), "convolve_rir: empty rir");
  int64_t n = static_cast<int64_t>(speech.samples.size());
  int64_t m = static_cast<int64_t>(rir.samples.size());
  require(n > 0, "convolve_rir: empty speech");
  size_t len = 1;
  while (len < static_cast<size_t>(n + m - 1)) len <<= 1;
  std::vector<std::complex<double>> a(len), b(len);
  for (int64_t i = 0; i < n; ++i) a[static_cast<size_t>(i)] = speech.samples[static_cast<size_t>(i)];
  for (int64_t i = 0; i < m; ++i) b[static_cast<size_t>(i)] = rir.samples[static_cast<size_t>(i)];
  dsp::fft(a, false);
  dsp::fft(b, false);
  for (size_t i = 0; i < len; ++i) a[i] *= b[i];
  dsp::fft(a, true);

  dsp::Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples.resize(static_cast<size_t>(n));
  double peak_in = 0.0, peak_out = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double v = a[static_cast<size_t>(i)].real();
    out.samples[static_cast<size_t>(i)] = v;
    peak_out = std::max(peak_out, std::abs(v));
    peak_in = std::max(peak_in, std::abs(speech.samples[static_cast<size_t>(i)]));
  }
  if (peak_out > 0.0 && peak_in > 0.0) {
    double g = peak_in / peak_out;
    for (auto& v : out.samples) v *= g;
  }
  return out;
}

dsp::Waveform synth_rir(double rt60_s, double length_s, uint64_t seed, int sample_rate) {
  require(rt60_s > 0.0, "synth_rir: rt60 must be positive");
  require(length_s > 0.0, "synth_rir: length must be positive");
  int64_t n = static_cast<int64_t>(std::llround(length_s * sample_rate));
  dsp::Waveform rir;
  rir.sample_rate = sample_rate;
  rir.samples.assign(static_cast<size_t>(std::max<int64_t>(n, 1)), 0.0);
  rir.samples[0] = 1.0;  // direct path
  // Per-sample tail std 0.04 puts total tail energy near 1.9 * rt60 (vs
  // direct energy 1), so short rooms degenerate toward a bare impulse.
  Rng rng = Rng::stream(seed, "rir");
  for (int64_t i = 1; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate;
    double env = std::exp(-6.9 * t / rt60_s);
    rir.samples[static_cast<size_t>(i)] = 0.04 * env * rng.gauss();
  }
  return rir;
}

}  // namespace corpus
}  // namespace dfls
