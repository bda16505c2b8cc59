// corpus/augment.h

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

#ifndef DFLS_CORPUS_AUGMENT_H_
#define DFLS_CORPUS_AUGMENT_H_

#include <map>
#include <set>
#include <string>

#include "corpus/manifest.h"
#include "corpus/synth.h"

namespace dfls {
namespace corpus {

// Estimated SNR for every record, computed from the referenced WAVs.
std::map<std::string, double> estimate_manifest_snrs(const Manifest& m);

// Keeps the ceil(fraction*N) records with the highest estimated SNR,
// breaking ties by ascending id.
Manifest snr_filter_top_fraction(const Manifest& m, double fraction,
                                 const std::map<std::string, double>& estimates);

struct AugmentConfig {
  std::set<std::string> classes;  // enabled noise classes; must be nonempty
  int copies = 3;
  double snr_lo = 0.0, snr_hi = 20.0;
  double reverb_prob = 0.0;
  uint64_t seed = 0;
};

// Emits copies*N corrupted records (kind noisy or noisy_reverb), writing
// one WAV per record. Deterministic per (seed, parent id, copy index).
Manifest build_augmented_corpus(const Manifest& clean, const NoiseInventory& noises,
                                const RirInventory& rirs, const AugmentConfig& cfg,
                                const std::string& out_dir);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_AUGMENT_H_
