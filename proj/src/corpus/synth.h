// corpus/synth.h

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

#ifndef DFLS_CORPUS_SYNTH_H_
#define DFLS_CORPUS_SYNTH_H_

#include <map>
#include <string>
#include <vector>

#include "corpus/manifest.h"
#include "dsp/features.h"
#include "util/rng.h"

namespace dfls {
namespace corpus {

// Source-filter voice model: harmonic pulse train at a per-speaker F0 with
// jitter, three speaker-specific formant resonators, syllabic amplitude
// modulation and pauses.
struct VoiceParams {
  double f0_base = 120.0;
  double f0_jitter = 0.06;  // relative wander
  double formants[3] = {500.0, 1500.0, 2500.0};
  double bandwidths[3] = {90.0, 120.0, 160.0};
  double am_rate_hz = 3.5;
  double pause_prob = 0.25;
};

// Deterministic per (seed, speaker index); speakers are spread across the
// F0/formant space so they stay pairwise distinguishable.
// `f0_jitter_scale` < 1 yields a low-variability, read-speech-like pool.
VoiceParams speaker_voice(uint64_t seed, int speaker_idx, int n_speakers,
                          double f0_jitter_scale = 1.0);

dsp::Waveform synth_utterance(const VoiceParams& v, double duration_s, Rng& rng,
                              int sample_rate = 16000);

struct SyntheticSpec {
  int n_speakers = 10;
  int utts_per_speaker = 20;
  double utt_duration_s = 3.0;
  uint64_t seed = 0;
  double f0_jitter_scale = 1.0;
  std::string speaker_prefix = "spk";
};

// Writes one WAV per utterance under out_dir and returns the manifest.
Manifest synth_corpus(const SyntheticSpec& spec, const std::string& out_dir);

// Noise classes: "noise" = white/pink bursts, "music" = sustained tonal
// chords, "babble" = 3-6 overlapped synthetic voices, "chime3bg" =
// slowly modulated low-frequency colored noise.
dsp::Waveform synth_noise(const std::string& noise_class, double duration_s,
                          Rng& rng, int sample_rate = 16000);

struct NoiseInventory {
  // class -> wav paths
  std::map<std::string, std::vector<std::string>> files;
};

struct NoiseSpec {
  std::vector<std::string> classes = {"noise", "music", "babble", "chime3bg"};
  int files_per_class = 12;
  double duration_s = 4.0;
  uint64_t seed = 0;
};

NoiseInventory synth_noise_inventory(const NoiseSpec& spec, const std::string& out_dir);

struct RirInventory {
  std::vector<std::string> ids;
  std::vector<std::string> paths;
};

struct RirSpec {
  int count = 8;
  double rt60_lo = 0.3, rt60_hi = 0.8;
  double length_s = 0.5;
  uint64_t seed = 0;
};

RirInventory synth_rir_inventory(const RirSpec& spec, const std::string& out_dir);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_SYNTH_H_
