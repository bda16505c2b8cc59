// corpus/augment.cc

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

#include "corpus/augment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "corpus/mix.h"
#include "corpus/wada.h"
#include "corpus/wav_io.h"

namespace dfls {
namespace corpus {

namespace fs = std::filesystem;

std::map<std::string, double> estimate_manifest_snrs(const Manifest& m) {
  std::map<std::string, double> out;
  for (const auto& r : m) out[r.id] = estimate_snr(read_wav(r.path));
  return out;
}

Manifest snr_filter_top_fraction(const Manifest& m, double fraction,
                                 const std::map<std::string, double>& estimates) {
  require(!m.empty(), "snr_filter_top_fraction: empty manifest");
  require(fraction > 0.0 && fraction <= 1.0, "snr_filter_top_fraction: bad fraction");
  std::vector<const ManifestRecord*> recs;
  recs.reserve(m.size());
  for (const auto& r : m) {
    require(estimates.count(r.id) > 0,
            strcat_("snr_filter_top_fraction: no estimate for '", r.id, "'"));
    recs.push_back(&r);
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [&](const ManifestRecord* a, const ManifestRecord* b) {
                     double ea = estimates.at(a->id), eb = estimates.at(b->id);
                     if (ea != eb) return ea > eb;
                     return a->id < b->id;
                   });
  size_t keep = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(recs.size())));
  Manifest out;
  out.reserve(keep);
  for (size_t i = 0; i < keep; ++i) out.push_back(*recs[i]);
  return out;
}

Manifest build_augmented_corpus(const Manifest& clean, const NoiseInventory& noises,
                                const RirInventory& rirs, const AugmentConfig& cfg,
                                const std::string& out_dir) {
  require(!cfg.classes.empty(), "build_augmented_corpus: empty noise class set");
  require(cfg.copies >= 1, "build_augmented_corpus: copies must be >= 1");
  for (const auto& cls : cfg.classes)
    require(noises.files.count(cls) > 0 && !noises.files.at(cls).empty(),
            strcat_("build_augmented_corpus: no noise files for class '", cls, "'"));
  if (cfg.reverb_prob > 0.0)
    require(!rirs.paths.empty(), "build_augmented_corpus: reverb requested but no rirs");
  fs::create_directories(out_dir);

  std::vector<std::string> class_list(cfg.classes.begin(), cfg.classes.end());
  Manifest out;
  out.reserve(clean.size() * static_cast<size_t>(cfg.copies));
  for (const auto& parent : clean) {
    dsp::Waveform speech = read_wav(parent.path);
    for (int copy = 0; copy < cfg.copies; ++copy) {
      Rng rng = Rng::stream(cfg.seed, "aug",
                            fnv1a_u64(static_cast<uint64_t>(copy), fnv1a(parent.id)));
      const std::string& cls = class_list[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(class_list.size()) - 1))];
      const auto& files = noises.files.at(cls);
      const std::string& noise_path = files[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(files.size()) - 1))];
      double snr = rng.uniform(cfg.snr_lo, cfg.snr_hi);
      bool reverb = rng.uniform() < cfg.reverb_prob;

      dsp::Waveform base = speech;
      std::optional<std::string> rir_id;
      if (reverb) {
        size_t ri = static_cast<size_t>(
            rng.uniform_int(0, static_cast<int64_t>(rirs.paths.size()) - 1));
        base = convolve_rir(base, read_wav(rirs.paths[ri]));
        rir_id = rirs.ids[ri];
      }
      MixResult mixed = mix_at_snr(base, read_wav(noise_path), snr);

      ManifestRecord r;
      r.id = strcat_(parent.id, "_aug", copy);
      r.path = (fs::path(out_dir) / (r.id + ".wav")).string();
      r.speaker = parent.speaker;
      r.kind = reverb ? Kind::kNoisyReverb : Kind::kNoisy;
      r.parent_id = parent.id;
      r.noise_class = cls;
      r.snr_db = snr;
      r.rir_id = rir_id;
      r.duration_s = mixed.mixed.duration_s();
      write_wav(mixed.mixed, r.path);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace corpus
}  // namespace dfls
