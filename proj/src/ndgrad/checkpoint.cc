// ndgrad/checkpoint.cc

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

#include "ndgrad/checkpoint.h"

#include <fstream>

#include "util/binio.h"

namespace dfls {
namespace ndgrad {

namespace {
constexpr char kMagic[4] = {'D', 'F', 'L', 'S'};
constexpr uint32_t kVersion = 1;
}  // namespace

template <typename Real>
void save_checkpoint(const ParamStore<Real>& params, const std::string& path) {
  check_little_endian();
  std::ofstream os(path, std::ios::binary);
  ensure(os.good(), strcat_("cannot open '", path, "' for writing"));
  write_bytes(os, kMagic, 4);
  write_pod<uint32_t>(os, kVersion);
  auto names = params.names();
  write_pod<uint32_t>(os, static_cast<uint32_t>(names.size()));
  for (const std::string& name : names) {
    const Tensor<Real>& t = params.value(name);
    write_string(os, name);
    write_pod<uint32_t>(os, static_cast<uint32_t>(t.rank()));
    for (int64_t d : t.shape()) write_pod<uint64_t>(os, static_cast<uint64_t>(d));
    for (int64_t i = 0; i < t.numel(); ++i)
      write_pod<float>(os, static_cast<float>(t[i]));
  }
  ensure(os.good(), strcat_("write failed for '", path, "'"));
}

template <typename Real>
ParamStore<Real> load_checkpoint(const std::string& path) {
  check_little_endian();
  std::ifstream is(path, std::ios::binary);
  ensure(is.good(), strcat_("cannot open '", path, "' for reading"));
  char magic[4];
  read_bytes(is, magic, 4);
  ensure(std::equal(magic, magic + 4, kMagic), strcat_("'", path, "' is not a checkpoint"));
  uint32_t version = read_pod<uint32_t>(is);
  ensure(version == kVersion, strcat_("unsupported checkpoint version ", version));
  uint32_t count = read_pod<uint32_t>(is);
  ParamStore<Real> out;
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = read_string(is);
    uint32_t rank = read_pod<uint32_t>(is);
    std::vector<int64_t> shape(rank);
    for (uint32_t r = 0; r < rank; ++r)
      shape[r] = static_cast<int64_t>(read_pod<uint64_t>(is));
    Tensor<Real>& t = out.create(name, shape);
    for (int64_t j = 0; j < t.numel(); ++j)
      t[j] = static_cast<Real>(read_pod<float>(is));
  }
  return out;
}

template void save_checkpoint<float>(const ParamStore<float>&, const std::string&);
template void save_checkpoint<double>(const ParamStore<double>&, const std::string&);
template ParamStore<float> load_checkpoint<float>(const std::string&);
template ParamStore<double> load_checkpoint<double>(const std::string&);

}  // namespace ndgrad
}  // namespace dfls
