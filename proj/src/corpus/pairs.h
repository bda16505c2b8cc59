// corpus/pairs.h

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

#ifndef DFLS_CORPUS_PAIRS_H_
#define DFLS_CORPUS_PAIRS_H_

#include <set>
#include <string>
#include <vector>

#include "corpus/manifest.h"
#include "corpus/synth.h"

namespace dfls {
namespace corpus {

// A supervised enhancement example: corrupted-side features, clean-side
// target features, and (for the "both" task) the reverberant-only
// mid-network target. Paths point at FEAT files with identical framing.
struct TrainingPair {
  std::string id;
  std::string noisy_feat;
  std::string clean_feat;
  std::string mid_feat;  // empty unless task == "both"
  std::string task;      // denoise | dereverb | both
};

struct PairList {
  std::vector<TrainingPair> train;
  std::vector<TrainingPair> val;
};

struct PairConfig {
  // "denoise", "dereverb", "both", or "mixed" (equal thirds by utterance).
  std::string task = "denoise";
  std::set<std::string> classes = {"noise", "music", "babble", "chime3bg"};
  double snr_lo = 0.0, snr_hi = 20.0;
  double split = 0.9;
  uint64_t seed = 0;
  // Corrupted-side feature space; the clean side is always aux-space LMFB.
  int enh_feat_dim = 40;
  bool enh_logspec = false;
  int aux_feat_dim = 40;
};

// Corrupts every clean utterance per the task, extracts features for both
// sides (and the reverb-only middle for "both"), and splits by utterance
// into train/val. Requires at least 10 utterances.
PairList make_training_pairs(const Manifest& clean, const NoiseInventory& noises,
                             const RirInventory& rirs, const PairConfig& cfg,
                             const std::string& out_dir);

void save_pairs(const PairList& pairs, const std::string& path);
PairList load_pairs(const std::string& path);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_PAIRS_H_
