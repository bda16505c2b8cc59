// dsp/features.cc

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

#include "dsp/features.h"

#include <algorithm>
#include <cmath>

#include "dsp/fft.h"

namespace dfls {
namespace dsp {

namespace {

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

}  // namespace

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  require(static_cast<int64_t>(w.samples.size()) >= cfg.frame_len,
          strcat_("stft: input too short (", w.samples.size(), " < ", cfg.frame_len,
                  " samples)"));
  require(cfg.n_fft >= cfg.frame_len, "stft: n_fft must cover the frame");
  int64_t t_len = cfg.num_frames(static_cast<int64_t>(w.samples.size()));
  int64_t bins = cfg.n_fft / 2 + 1;
  Spectrogram out;
  out.bins = bins;
  out.frames = t_len;
  out.cfg = cfg;
  out.data.assign(static_cast<size_t>(bins * t_len), {0.0, 0.0});
  std::vector<double> win = hann_window(cfg.frame_len);
  std::vector<std::complex<double>> buf(static_cast<size_t>(cfg.n_fft));
  for (int64_t t = 0; t < t_len; ++t) {
    int64_t start = t * cfg.hop;
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < cfg.frame_len; ++i)
      buf[static_cast<size_t>(i)] =
          w.samples[static_cast<size_t>(start + i)] * win[static_cast<size_t>(i)];
    fft(buf, false);
    for (int64_t b = 0; b < bins; ++b) out.at(b, t) = buf[static_cast<size_t>(b)];
  }
  return out;
}

Waveform istft(const Spectrogram& spec, int64_t n_samples, int sample_rate) {
  const StftConfig& cfg = spec.cfg;
  require(spec.bins == cfg.n_fft / 2 + 1, "istft: bin count mismatch");
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(static_cast<size_t>(n_samples), 0.0);
  std::vector<double> denom(static_cast<size_t>(n_samples), 0.0);
  std::vector<double> win = hann_window(cfg.frame_len);
  std::vector<std::complex<double>> buf(static_cast<size_t>(cfg.n_fft));
  for (int64_t t = 0; t < spec.frames; ++t) {
    for (int64_t b = 0; b < spec.bins; ++b) buf[static_cast<size_t>(b)] = spec.at(b, t);
    // Hermitian completion of the upper half.
    for (int64_t b = spec.bins; b < cfg.n_fft; ++b)
      buf[static_cast<size_t>(b)] = std::conj(spec.at(cfg.n_fft - b, t));
    fft(buf, true);
    int64_t start = t * cfg.hop;
    for (int i = 0; i < cfg.frame_len; ++i) {
      int64_t n = start + i;
      if (n >= n_samples) break;
      double wv = win[static_cast<size_t>(i)];
      out.samples[static_cast<size_t>(n)] += wv * buf[static_cast<size_t>(i)].real();
      denom[static_cast<size_t>(n)] += wv * wv;
    }
  }
  for (int64_t n = 0; n < n_samples; ++n) {
    double d = denom[static_cast<size_t>(n)];
    if (d > 1e-8) out.samples[static_cast<size_t>(n)] /= d;
  }
  return out;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

std::vector<double> mel_filterbank(int n_mels, int n_fft, int fs, double fmin,
                                   double fmax) {
  require(n_mels >= 1, "mel_filterbank: n_mels must be >= 1");
  require(fmin >= 0.0 && fmin < fmax && fmax <= fs / 2.0,
          "mel_filterbank: need 0 <= fmin < fmax <= fs/2");
  int bins = n_fft / 2 + 1;
  std::vector<double> fb(static_cast<size_t>(n_mels) * bins, 0.0);
  double mel_lo = hz_to_mel(fmin);
  double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(static_cast<size_t>(n_mels) + 2);
  for (int m = 0; m < n_mels + 2; ++m)
    edges[static_cast<size_t>(m)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (n_mels + 1));
  double bin_hz = static_cast<double>(fs) / n_fft;
  for (int m = 0; m < n_mels; ++m) {
    double f_lo = edges[static_cast<size_t>(m)];
    double f_cn = edges[static_cast<size_t>(m) + 1];
    double f_hi = edges[static_cast<size_t>(m) + 2];
    double norm = 2.0 / (f_hi - f_lo);
    double* row = fb.data() + static_cast<size_t>(m) * bins;
    for (int b = 0; b < bins; ++b) {
      double f = b * bin_hz;
      double wgt = 0.0;
      if (f > f_lo && f < f_hi)
        wgt = f <= f_cn ? (f - f_lo) / (f_cn - f_lo) : (f_hi - f) / (f_hi - f_cn);
      row[b] = wgt * norm;
    }
    bool empty = true;
    for (int b = 0; b < bins; ++b)
      if (row[b] > 0.0) {
        empty = false;
        break;
      }
    if (empty) {
      int b = static_cast<int>(std::lround(f_cn / bin_hz));
      b = std::clamp(b, 0, bins - 1);
      row[b] = norm;
    }
  }
  return fb;
}

FeatureMatrix logmelfb(const Waveform& w, int n_mels) {
  Spectrogram spec = stft(w);
  std::vector<double> fb = mel_filterbank(n_mels, spec.cfg.n_fft, w.sample_rate);
  int64_t bins = spec.bins;
  FeatureMatrix out(n_mels, spec.frames, FeatureMatrix::Kind::kLmfb);
  std::vector<double> power(static_cast<size_t>(bins));
  for (int64_t t = 0; t < spec.frames; ++t) {
    for (int64_t b = 0; b < bins; ++b) power[static_cast<size_t>(b)] = std::norm(spec.at(b, t));
    for (int m = 0; m < n_mels; ++m) {
      const double* row = fb.data() + static_cast<size_t>(m) * bins;
      double e = 0.0;
      for (int64_t b = 0; b < bins; ++b) e += row[b] * power[static_cast<size_t>(b)];
      out.at(m, t) = static_cast<float>(std::log(std::max(e, kLogFloor)));
    }
  }
  return out;
}

FeatureMatrix logspec(const Waveform& w) {
  Spectrogram spec = stft(w);
  constexpr int64_t kDim = 256;
  FeatureMatrix out(kDim, spec.frames, FeatureMatrix::Kind::kLogspec);
  for (int64_t t = 0; t < spec.frames; ++t)
    for (int64_t b = 0; b < kDim; ++b)
      out.at(b, t) =
          static_cast<float>(std::log(std::max(std::norm(spec.at(b, t)), kLogFloor)));
  return out;
}

FeatureMatrix mean_normalize_online(const FeatureMatrix& f, int window) {
  require(window >= 1 && window % 2 == 1, "mean_normalize_online: odd window required");
  require(f.frames >= 1, "mean_normalize_online: empty input");
  FeatureMatrix out = f;
  int64_t half = window / 2;
  std::vector<double> prefix(static_cast<size_t>(f.frames) + 1, 0.0);
  for (int64_t d = 0; d < f.dim; ++d) {
    for (int64_t t = 0; t < f.frames; ++t)
      prefix[static_cast<size_t>(t) + 1] = prefix[static_cast<size_t>(t)] + f.at(d, t);
    for (int64_t t = 0; t < f.frames; ++t) {
      int64_t lo = std::max<int64_t>(0, t - half);
      int64_t hi = std::min<int64_t>(f.frames - 1, t + half);
      double mean = (prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)]) /
                    static_cast<double>(hi - lo + 1);
      out.at(d, t) = static_cast<float>(f.at(d, t) - mean);
    }
  }
  out.normalized = true;
  return out;
}

std::vector<float> frame_log_energies(const Waveform& w) {
  Spectrogram spec = stft(w);
  std::vector<float> out(static_cast<size_t>(spec.frames));
  for (int64_t t = 0; t < spec.frames; ++t) {
    double e = 0.0;
    for (int64_t b = 0; b < spec.bins; ++b) e += std::norm(spec.at(b, t));
    out[static_cast<size_t>(t)] = static_cast<float>(std::log(std::max(e, kLogFloor)));
  }
  return out;
}

float energy_percentile(std::vector<float> energies, double fraction) {
  require(!energies.empty(), "energy_percentile: no energies");
  require(fraction >= 0.0 && fraction <= 1.0, "energy_percentile: bad fraction");
  std::sort(energies.begin(), energies.end());
  size_t rank = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(energies.size())));
  if (rank > 0) --rank;
  return energies[rank];
}

FeatureMatrix drop_silent_frames(const FeatureMatrix& f,
                                 const std::vector<float>& log_energies,
                                 float threshold, int64_t min_frames) {
  require(static_cast<int64_t>(log_energies.size()) == f.frames,
          "drop_silent_frames: energy/frame count mismatch");
  std::vector<int64_t> keep;
  keep.reserve(static_cast<size_t>(f.frames));
  for (int64_t t = 0; t < f.frames; ++t)
    if (log_energies[static_cast<size_t>(t)] > threshold) keep.push_back(t);
  if (static_cast<int64_t>(keep.size()) < min_frames) return f;
  FeatureMatrix out(f.dim, static_cast<int64_t>(keep.size()), f.kind);
  out.normalized = f.normalized;
  for (int64_t d = 0; d < f.dim; ++d)
    for (size_t i = 0; i < keep.size(); ++i)
      out.at(d, static_cast<int64_t>(i)) = f.at(d, keep[i]);
  return out;
}

}  // namespace dsp
}  // namespace dfls
