// dsp/feature_io.cc

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

#include "dsp/feature_io.h"

#include <fstream>

#include "util/binio.h"

namespace dfls {
namespace dsp {

namespace {
constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};
constexpr uint32_t kVersion = 1;
}  // namespace

void save_features(const FeatureMatrix& f, const std::string& path) {
  check_little_endian();
  std::ofstream os(path, std::ios::binary);
  ensure(os.good(), strcat_("cannot open '", path, "' for writing"));
  write_bytes(os, kMagic, 4);
  write_pod<uint32_t>(os, kVersion);
  write_pod<uint32_t>(os, static_cast<uint32_t>(f.dim));
  write_pod<uint32_t>(os, static_cast<uint32_t>(f.frames));
  write_pod<uint8_t>(os, static_cast<uint8_t>(f.kind));
  write_bytes(os, f.data.data(), f.data.size() * sizeof(float));
  ensure(os.good(), strcat_("write failed for '", path, "'"));
}

FeatureMatrix load_features(const std::string& path) {
  check_little_endian();
  std::ifstream is(path, std::ios::binary);
  ensure(is.good(), strcat_("cannot open '", path, "' for reading"));
  char magic[4];
  read_bytes(is, magic, 4);
  ensure(std::equal(magic, magic + 4, kMagic), strcat_("'", path, "' is not a feature file"));
  uint32_t version = read_pod<uint32_t>(is);
  ensure(version == kVersion, strcat_("unsupported feature file version ", version));
  uint32_t d = read_pod<uint32_t>(is);
  uint32_t t = read_pod<uint32_t>(is);
  uint8_t kind = read_pod<uint8_t>(is);
  ensure(kind <= 1, "bad feature kind byte");
  FeatureMatrix f(d, t, static_cast<FeatureMatrix::Kind>(kind));
  read_bytes(is, f.data.data(), f.data.size() * sizeof(float));
  return f;
}

}  // namespace dsp
}  // namespace dfls
