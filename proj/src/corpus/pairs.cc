// corpus/pairs.cc

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

#include "corpus/pairs.h"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "corpus/mix.h"
#include "corpus/wav_io.h"
#include "dsp/feature_io.h"

namespace dfls {
namespace corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

dsp::FeatureMatrix corrupted_features(const dsp::Waveform& w, const PairConfig& cfg) {
  if (cfg.enh_logspec) return dsp::logspec(w);
  return dsp::logmelfb(w, cfg.enh_feat_dim);
}

std::string task_for_utt(const PairConfig& cfg, size_t utt_idx) {
  if (cfg.task == "mixed") {
    // Equal thirds: denoise-only, dereverb-only, both.
    switch (utt_idx % 3) {
      case 0: return "denoise";
      case 1: return "dereverb";
      default: return "both";
    }
  }
  return cfg.task;
}

}  // namespace

PairList make_training_pairs(const Manifest& clean, const NoiseInventory& noises,
                             const RirInventory& rirs, const PairConfig& cfg,
                             const std::string& out_dir) {
  require(clean.size() >= 10, "make_training_pairs: need at least 10 utterances");
  require(cfg.split > 0.0 && cfg.split < 1.0, "make_training_pairs: bad split");
  require(cfg.task == "denoise" || cfg.task == "dereverb" || cfg.task == "both" ||
              cfg.task == "mixed",
          strcat_("make_training_pairs: unknown task '", cfg.task, "'"));
  bool needs_noise = cfg.task != "dereverb";
  bool needs_rir = cfg.task != "denoise";
  if (needs_noise) {
    require(!cfg.classes.empty(), "make_training_pairs: empty noise class set");
    for (const auto& cls : cfg.classes)
      require(noises.files.count(cls) > 0 && !noises.files.at(cls).empty(),
              strcat_("make_training_pairs: no noise files for class '", cls, "'"));
  }
  if (needs_rir) require(!rirs.paths.empty(), "make_training_pairs: no rirs");

  fs::path feat_dir = fs::path(out_dir) / "feats";
  fs::create_directories(feat_dir);
  std::string enh_tag =
      cfg.enh_logspec ? "logspec256" : strcat_("lmfb", cfg.enh_feat_dim);
  std::string aux_tag = strcat_("lmfb", cfg.aux_feat_dim);
  std::vector<std::string> class_list(cfg.classes.begin(), cfg.classes.end());

  std::vector<TrainingPair> all;
  all.reserve(clean.size());
  for (size_t idx = 0; idx < clean.size(); ++idx) {
    const auto& rec = clean[idx];
    std::string task = task_for_utt(cfg, idx);
    Rng rng = Rng::stream(cfg.seed, "pair", fnv1a(rec.id));
    dsp::Waveform speech = read_wav(rec.path);

    dsp::Waveform corrupted = speech;
    dsp::Waveform mid;
    if (task != "denoise") {
      size_t ri = static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(rirs.paths.size()) - 1));
      corrupted = convolve_rir(corrupted, read_wav(rirs.paths[ri]));
      if (task == "both") mid = corrupted;
    }
    if (task != "dereverb") {
      const auto& cls = class_list[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(class_list.size()) - 1))];
      const auto& files = noises.files.at(cls);
      const auto& noise_path = files[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(files.size()) - 1))];
      corrupted = mix_at_snr(corrupted, read_wav(noise_path),
                             rng.uniform(cfg.snr_lo, cfg.snr_hi))
                      .mixed;
    }

    TrainingPair p;
    p.id = rec.id;
    p.task = task;
    p.noisy_feat = (feat_dir / strcat_(rec.id, ".noisy.", enh_tag, ".feat")).string();
    p.clean_feat = (feat_dir / strcat_(rec.id, ".clean.", aux_tag, ".feat")).string();
    dsp::save_features(corrupted_features(corrupted, cfg), p.noisy_feat);
    dsp::save_features(dsp::logmelfb(speech, cfg.aux_feat_dim), p.clean_feat);
    if (task == "both") {
      p.mid_feat = (feat_dir / strcat_(rec.id, ".mid.", aux_tag, ".feat")).string();
      dsp::save_features(dsp::logmelfb(mid, cfg.aux_feat_dim), p.mid_feat);
    }
    all.push_back(std::move(p));
  }

  // Split by utterance after a seeded shuffle.
  Rng split_rng = Rng::stream(cfg.seed, "pair-split");
  split_rng.shuffle(all);
  size_t n_train = static_cast<size_t>(cfg.split * static_cast<double>(all.size()));
  PairList out;
  out.train.assign(all.begin(), all.begin() + static_cast<int64_t>(n_train));
  out.val.assign(all.begin() + static_cast<int64_t>(n_train), all.end());
  require(!out.val.empty(), "make_training_pairs: validation split came out empty");
  return out;
}

namespace {

json pair_to_json(const TrainingPair& p) {
  json j;
  j["id"] = p.id;
  j["noisy_feat"] = p.noisy_feat;
  j["clean_feat"] = p.clean_feat;
  if (!p.mid_feat.empty()) j["mid_feat"] = p.mid_feat;
  j["task"] = p.task;
  return j;
}

TrainingPair pair_from_json(const json& j) {
  TrainingPair p;
  p.id = j.at("id").get<std::string>();
  p.noisy_feat = j.at("noisy_feat").get<std::string>();
  p.clean_feat = j.at("clean_feat").get<std::string>();
  if (j.contains("mid_feat")) p.mid_feat = j["mid_feat"].get<std::string>();
  p.task = j.at("task").get<std::string>();
  return p;
}

}  // namespace

void save_pairs(const PairList& pairs, const std::string& path) {
  std::ofstream os(path);
  ensure(os.good(), strcat_("cannot open '", path, "' for writing"));
  for (const auto& p : pairs.train) {
    json j = pair_to_json(p);
    j["split"] = "train";
    os << j.dump() << "\n";
  }
  for (const auto& p : pairs.val) {
    json j = pair_to_json(p);
    j["split"] = "val";
    os << j.dump() << "\n";
  }
  ensure(os.good(), strcat_("write failed for '", path, "'"));
}

PairList load_pairs(const std::string& path) {
  std::ifstream is(path);
  ensure(is.good(), strcat_("cannot open '", path, "' for reading"));
  PairList out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    TrainingPair p = pair_from_json(j);
    if (j.at("split").get<std::string>() == "train")
      out.train.push_back(std::move(p));
    else
      out.val.push_back(std::move(p));
  }
  return out;
}

}  // namespace corpus
}  // namespace dfls
