// corpus/manifest.cc

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

#include "corpus/manifest.h"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "util/common.h"

namespace dfls {
namespace corpus {

using nlohmann::json;

std::string kind_to_string(Kind k) {
  switch (k) {
    case Kind::kClean: return "clean";
    case Kind::kNoisy: return "noisy";
    case Kind::kReverb: return "reverb";
    case Kind::kNoisyReverb: return "noisy_reverb";
    case Kind::kEnhanced: return "enhanced";
  }
  throw std::logic_error("bad kind");
}

Kind kind_from_string(const std::string& s) {
  if (s == "clean") return Kind::kClean;
  if (s == "noisy") return Kind::kNoisy;
  if (s == "reverb") return Kind::kReverb;
  if (s == "noisy_reverb") return Kind::kNoisyReverb;
  if (s == "enhanced") return Kind::kEnhanced;
  throw std::invalid_argument(strcat_("unknown record kind '", s, "'"));
}

void validate_manifest(const Manifest& m) {
  std::unordered_set<std::string> ids;
  for (const auto& r : m) {
    require(!r.id.empty(), "manifest: empty id");
    require(ids.insert(r.id).second, strcat_("manifest: duplicate id '", r.id, "'"));
    if (r.kind != Kind::kClean)
      require(r.parent_id.has_value(),
              strcat_("manifest: record '", r.id, "' is corrupted but has no parent_id"));
    if (r.kind == Kind::kNoisy || r.kind == Kind::kNoisyReverb) {
      require(r.snr_db.has_value(),
              strcat_("manifest: noisy record '", r.id, "' lacks snr_db"));
      require(r.noise_class.has_value(),
              strcat_("manifest: noisy record '", r.id, "' lacks noise_class"));
    }
    if (r.noise_class)
      require(noise_class_names().count(*r.noise_class) > 0,
              strcat_("manifest: unknown noise class '", *r.noise_class, "'"));
  }
}

void save_manifest(const Manifest& m, const std::string& path) {
  validate_manifest(m);
  std::ofstream os(path);
  ensure(os.good(), strcat_("cannot open '", path, "' for writing"));
  for (const auto& r : m) {
    json j;
    j["id"] = r.id;
    j["path"] = r.path;
    j["speaker"] = r.speaker;
    j["kind"] = kind_to_string(r.kind);
    if (r.parent_id) j["parent_id"] = *r.parent_id;
    if (r.noise_class) j["noise_class"] = *r.noise_class;
    if (r.snr_db) j["snr_db"] = *r.snr_db;
    if (r.rir_id) j["rir_id"] = *r.rir_id;
    j["duration_s"] = r.duration_s;
    os << j.dump() << "\n";
  }
  ensure(os.good(), strcat_("write failed for '", path, "'"));
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  ensure(is.good(), strcat_("cannot open '", path, "' for reading"));
  Manifest m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.path = j.at("path").get<std::string>();
    r.speaker = j.at("speaker").get<std::string>();
    r.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("parent_id")) r.parent_id = j["parent_id"].get<std::string>();
    if (j.contains("noise_class")) r.noise_class = j["noise_class"].get<std::string>();
    if (j.contains("snr_db")) r.snr_db = j["snr_db"].get<double>();
    if (j.contains("rir_id")) r.rir_id = j["rir_id"].get<std::string>();
    r.duration_s = j.at("duration_s").get<double>();
    m.push_back(std::move(r));
  }
  validate_manifest(m);
  return m;
}

}  // namespace corpus
}  // namespace dfls
