// corpus/manifest.h

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

#ifndef DFLS_CORPUS_MANIFEST_H_
#define DFLS_CORPUS_MANIFEST_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dfls {
namespace corpus {

enum class Kind { kClean, kNoisy, kReverb, kNoisyReverb, kEnhanced };

std::string kind_to_string(Kind k);
Kind kind_from_string(const std::string& s);

inline const std::set<std::string>& noise_class_names() {
  static const std::set<std::string> kNames = {"noise", "music", "babble", "chime3bg"};
  return kNames;
}

struct ManifestRecord {
  std::string id;
  std::string path;
  std::string speaker;
  Kind kind = Kind::kClean;
  std::optional<std::string> parent_id;
  std::optional<std::string> noise_class;
  std::optional<double> snr_db;
  std::optional<std::string> rir_id;
  double duration_s = 0.0;
};

using Manifest = std::vector<ManifestRecord>;

// Validates the per-record invariants: unique ids, provenance present on
// corrupted kinds, snr/class present on noisy kinds.
void validate_manifest(const Manifest& m);

// JSON Lines, one record per line.
void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

}  // namespace corpus
}  // namespace dfls

#endif  // DFLS_CORPUS_MANIFEST_H_
