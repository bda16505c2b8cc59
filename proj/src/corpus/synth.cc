// corpus/synth.cc

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

#include "corpus/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "corpus/mix.h"
#include "corpus/wav_io.h"

namespace dfls {
namespace corpus {

namespace fs = std::filesystem;

namespace {

// Two-pole resonator applied in place.
void resonate(std::vector<double>& x, double freq_hz, double bw_hz, int fs) {
  double r = std::exp(-M_PI * bw_hz / fs);
  double c = 2.0 * r * std::cos(2.0 * M_PI * freq_hz / fs);
  double r2 = r * r;
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    double y = v + c * y1 - r2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void peak_normalize(std::vector<double>& x, double peak) {
  double mx = 0.0;
  for (double v : x) mx = std::max(mx, std::abs(v));
  if (mx > 0.0) {
    double g = peak / mx;
    for (double& v : x) v *= g;
  }
}

// Piecewise-linear wander in [-1, 1], a new target every `seg_s` seconds.
std::vector<double> slow_wander(int64_t n, double seg_s, Rng& rng, int fs) {
  std::vector<double> out(static_cast<size_t>(n));
  int64_t seg = std::max<int64_t>(1, static_cast<int64_t>(seg_s * fs));
  double prev = rng.uniform(-1.0, 1.0);
  double next = rng.uniform(-1.0, 1.0);
  for (int64_t i = 0; i < n; ++i) {
    int64_t pos = i % seg;
    if (pos == 0 && i > 0) {
      prev = next;
      next = rng.uniform(-1.0, 1.0);
    }
    out[static_cast<size_t>(i)] =
        prev + (next - prev) * static_cast<double>(pos) / static_cast<double>(seg);
  }
  return out;
}

dsp::Waveform noise_white_bursts(double duration_s, Rng& rng, int fs) {
  int64_t n = static_cast<int64_t>(duration_s * fs);
  std::vector<double> x(static_cast<size_t>(n));
  // Pink-ish bed plus louder bursts.
  double lp = 0.0;
  double a = std::exp(-2.0 * M_PI * 800.0 / fs);
  for (int64_t i = 0; i < n; ++i) {
    double wht = rng.gauss();
    lp = a * lp + (1.0 - a) * wht;
    x[static_cast<size_t>(i)] = 0.2 * wht + 0.8 * lp * 3.0;
  }
  int bursts = static_cast<int>(rng.uniform_int(2, 5));
  for (int b = 0; b < bursts; ++b) {
    int64_t len = static_cast<int64_t>(rng.uniform(0.2, 1.0) * fs);
    int64_t start = rng.uniform_int(0, std::max<int64_t>(0, n - len - 1));
    for (int64_t i = 0; i < len; ++i) {
      double env = std::sin(M_PI * static_cast<double>(i) / static_cast<double>(len));
      x[static_cast<size_t>(start + i)] += 3.0 * env * rng.gauss();
    }
  }
  dsp::Waveform w;
  w.sample_rate = fs;
  w.samples = std::move(x);
  peak_normalize(w.samples, 0.35);
  return w;
}

dsp::Waveform noise_music(double duration_s, Rng& rng, int fs) {
  int64_t n = static_cast<int64_t>(duration_s * fs);
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  int64_t chord_len = static_cast<int64_t>(rng.uniform(0.8, 1.4) * fs);
  const double ratios[3] = {1.0, 1.25, 1.5};
  int64_t pos = 0;
  while (pos < n) {
    double root = rng.uniform(110.0, 440.0);
    int64_t len = std::min(chord_len, n - pos);
    double phase[9] = {0};
    int np = 0;
    double freqs[9];
    double amps[9];
    for (int note = 0; note < 3; ++note)
      for (int h = 1; h <= 3; ++h) {
        freqs[np] = root * ratios[note] * h;
        amps[np] = 1.0 / (h * (note + 1));
        ++np;
      }
    for (int64_t i = 0; i < len; ++i) {
      double fade = std::min({1.0, static_cast<double>(i) / (0.05 * fs),
                              static_cast<double>(len - i) / (0.05 * fs)});
      double s = 0.0;
      for (int p = 0; p < np; ++p) {
        phase[p] += 2.0 * M_PI * freqs[p] / fs;
        s += amps[p] * std::sin(phase[p]);
      }
      x[static_cast<size_t>(pos + i)] = fade * s;
    }
    pos += len;
  }
  dsp::Waveform w;
  w.sample_rate = fs;
  w.samples = std::move(x);
  peak_normalize(w.samples, 0.3);
  return w;
}

dsp::Waveform noise_babble(double duration_s, Rng& rng, int fs) {
  int64_t n = static_cast<int64_t>(duration_s * fs);
  std::vector<double> mix(static_cast<size_t>(n), 0.0);
  int talkers = static_cast<int>(rng.uniform_int(3, 6));
  for (int k = 0; k < talkers; ++k) {
    VoiceParams v;
    v.f0_base = rng.uniform(90.0, 240.0);
    v.f0_jitter = rng.uniform(0.04, 0.1);
    v.formants[0] = rng.uniform(320.0, 850.0);
    v.formants[1] = rng.uniform(950.0, 2300.0);
    v.formants[2] = rng.uniform(2400.0, 3400.0);
    v.am_rate_hz = rng.uniform(2.5, 4.5);
    v.pause_prob = 0.15;
    dsp::Waveform talker = synth_utterance(v, duration_s, rng, fs);
    for (int64_t i = 0; i < n && i < static_cast<int64_t>(talker.samples.size()); ++i)
      mix[static_cast<size_t>(i)] += talker.samples[static_cast<size_t>(i)];
  }
  dsp::Waveform w;
  w.sample_rate = fs;
  w.samples = std::move(mix);
  peak_normalize(w.samples, 0.35);
  return w;
}

dsp::Waveform noise_chime3bg(double duration_s, Rng& rng, int fs) {
  int64_t n = static_cast<int64_t>(duration_s * fs);
  std::vector<double> x(static_cast<size_t>(n));
  double fc = rng.uniform(120.0, 260.0);
  double a = std::exp(-2.0 * M_PI * fc / fs);
  double lp = 0.0, lp2 = 0.0;
  double am_rate = rng.uniform(0.2, 0.8);
  double ph = rng.uniform(0.0, 2.0 * M_PI);
  for (int64_t i = 0; i < n; ++i) {
    lp = a * lp + (1.0 - a) * rng.gauss();
    lp2 = a * lp2 + (1.0 - a) * lp;
    double am = 0.65 + 0.35 * std::sin(2.0 * M_PI * am_rate * i / fs + ph);
    x[static_cast<size_t>(i)] = lp2 * am;
  }
  dsp::Waveform w;
  w.sample_rate = fs;
  w.samples = std::move(x);
  peak_normalize(w.samples, 0.35);
  return w;
}

}  // namespace

VoiceParams speaker_voice(uint64_t seed, int speaker_idx, int n_speakers,
                          double f0_jitter_scale) {
  require(n_speakers >= 1, "speaker_voice: need at least one speaker");
  Rng rng = Rng::stream(seed, "voice", static_cast<uint64_t>(speaker_idx));
  VoiceParams v;
  // Deterministic spread over the F0 range plus a small per-speaker offset.
  double frac = n_speakers > 1
                    ? static_cast<double>(speaker_idx) / (n_speakers - 1)
                    : 0.5;
  v.f0_base = 85.0 + 170.0 * frac + rng.uniform(-6.0, 6.0);
  v.f0_jitter = f0_jitter_scale * rng.uniform(0.04, 0.09);
  v.formants[0] = rng.uniform(320.0, 880.0);
  v.formants[1] = rng.uniform(950.0, 2400.0);
  v.formants[2] = rng.uniform(2450.0, 3450.0);
  v.bandwidths[0] = rng.uniform(70.0, 120.0);
  v.bandwidths[1] = rng.uniform(90.0, 160.0);
  v.bandwidths[2] = rng.uniform(120.0, 220.0);
  v.am_rate_hz = rng.uniform(2.5, 4.5);
  v.pause_prob = rng.uniform(0.15, 0.3);
  return v;
}

dsp::Waveform synth_utterance(const VoiceParams& v, double duration_s, Rng& rng,
                              int fs) {
  require(duration_s > 0.0, "synth_utterance: duration must be positive");
  int64_t n = static_cast<int64_t>(duration_s * fs);
  std::vector<double> src(static_cast<size_t>(n), 0.0);
  std::vector<double> wander = slow_wander(n, 0.25, rng, fs);
  double phase = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double f0 = v.f0_base * (1.0 + v.f0_jitter * wander[static_cast<size_t>(i)]);
    phase += f0 / fs;
    if (phase >= 1.0) {
      phase -= 1.0;
      src[static_cast<size_t>(i)] = 1.0;
    }
    src[static_cast<size_t>(i)] += 0.015 * rng.gauss();  // aspiration
  }
  for (int k = 0; k < 3; ++k) resonate(src, v.formants[k], v.bandwidths[k], fs);

  // Syllabic amplitude modulation with occasional gated pauses.
  double am_phase = rng.uniform(0.0, 2.0 * M_PI);
  int64_t i = 0;
  while (i < n) {
    bool pause = rng.uniform() < v.pause_prob;
    double seg_s = pause ? rng.uniform(0.1, 0.25) : rng.uniform(0.35, 0.8);
    int64_t seg = std::min<int64_t>(n - i, static_cast<int64_t>(seg_s * fs));
    for (int64_t j = 0; j < seg; ++j) {
      double am =
          0.55 + 0.45 * std::sin(2.0 * M_PI * v.am_rate_hz * (i + j) / fs + am_phase);
      double edge = std::min({1.0, static_cast<double>(j) / (0.02 * fs),
                              static_cast<double>(seg - j) / (0.02 * fs)});
      src[static_cast<size_t>(i + j)] *= (pause ? 0.0 : am * edge);
    }
    i += seg;
  }
  peak_normalize(src, 0.3);
  dsp::Waveform out;
  out.sample_rate = fs;
  out.samples = std::move(src);
  return out;
}

Manifest synth_corpus(const SyntheticSpec& spec, const std::string& out_dir) {
  require(spec.n_speakers >= 2, "synth_corpus: need at least two speakers");
  require(spec.utts_per_speaker >= 1, "synth_corpus: need utterances per speaker");
  fs::create_directories(out_dir);
  Manifest manifest;
  for (int s = 0; s < spec.n_speakers; ++s) {
    VoiceParams voice =
        speaker_voice(spec.seed, s, spec.n_speakers, spec.f0_jitter_scale);
    std::string speaker = strcat_(spec.speaker_prefix,
                                  s < 10 ? "00" : (s < 100 ? "0" : ""), s);
    for (int u = 0; u < spec.utts_per_speaker; ++u) {
      Rng rng = Rng::stream(spec.seed, "utt",
                            static_cast<uint64_t>(s) * 100003ull + static_cast<uint64_t>(u));
      dsp::Waveform w = synth_utterance(voice, spec.utt_duration_s, rng);
      ManifestRecord r;
      r.id = strcat_(speaker, "_u", u < 10 ? "0" : "", u);
      r.path = (fs::path(out_dir) / (r.id + ".wav")).string();
      r.speaker = speaker;
      r.kind = Kind::kClean;
      r.duration_s = w.duration_s();
      write_wav(w, r.path);
      manifest.push_back(std::move(r));
    }
  }
  return manifest;
}

dsp::Waveform synth_noise(const std::string& noise_class, double duration_s, Rng& rng,
                          int fs) {
  if (noise_class == "noise") return noise_white_bursts(duration_s, rng, fs);
  if (noise_class == "music") return noise_music(duration_s, rng, fs);
  if (noise_class == "babble") return noise_babble(duration_s, rng, fs);
  if (noise_class == "chime3bg") return noise_chime3bg(duration_s, rng, fs);
  throw std::invalid_argument(strcat_("unknown noise class '", noise_class, "'"));
}

NoiseInventory synth_noise_inventory(const NoiseSpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  NoiseInventory inv;
  for (const std::string& cls : spec.classes) {
    require(noise_class_names().count(cls) > 0,
            strcat_("unknown noise class '", cls, "'"));
    for (int i = 0; i < spec.files_per_class; ++i) {
      Rng rng = Rng::stream(spec.seed, "noise-" + cls, static_cast<uint64_t>(i));
      dsp::Waveform w = synth_noise(cls, spec.duration_s, rng);
      std::string path =
          (fs::path(out_dir) / strcat_(cls, "_", i < 10 ? "0" : "", i, ".wav")).string();
      write_wav(w, path);
      inv.files[cls].push_back(path);
    }
  }
  return inv;
}

RirInventory synth_rir_inventory(const RirSpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  RirInventory inv;
  for (int i = 0; i < spec.count; ++i) {
    Rng rng = Rng::stream(spec.seed, "rirspec", static_cast<uint64_t>(i));
    double rt60 = rng.uniform(spec.rt60_lo, spec.rt60_hi);
    dsp::Waveform rir = synth_rir(rt60, spec.length_s,
                                  fnv1a_u64(spec.seed + static_cast<uint64_t>(i)));
    std::string id = strcat_("rir", i < 10 ? "0" : "", i);
    std::string path = (fs::path(out_dir) / (id + ".wav")).string();
    // RIR tails are tiny; scale up for the 16-bit container and undo on use.
    dsp::Waveform scaled = rir;
    peak_normalize(scaled.samples, 0.9);
    write_wav(scaled, path);
    inv.ids.push_back(id);
    inv.paths.push_back(path);
  }
  return inv;
}

}  // namespace corpus
}  // namespace dfls
