// corpus/wav_io.cc

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

#include "corpus/wav_io.h"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "util/binio.h"

namespace dfls {
namespace corpus {

int64_t write_wav(const dsp::Waveform& w, const std::string& path) {
  check_little_endian();
  std::ofstream os(path, std::ios::binary);
  ensure(os.good(), strcat_("cannot open '", path, "' for writing"));
  uint32_t n = static_cast<uint32_t>(w.samples.size());
  uint32_t data_bytes = n * 2;
  uint32_t sr = static_cast<uint32_t>(w.sample_rate);
  write_bytes(os, "RIFF", 4);
  write_pod<uint32_t>(os, 36 + data_bytes);
  write_bytes(os, "WAVE", 4);
  write_bytes(os, "fmt ", 4);
  write_pod<uint32_t>(os, 16);
  write_pod<uint16_t>(os, 1);   // PCM
  write_pod<uint16_t>(os, 1);   // mono
  write_pod<uint32_t>(os, sr);
  write_pod<uint32_t>(os, sr * 2);
  write_pod<uint16_t>(os, 2);
  write_pod<uint16_t>(os, 16);
  write_bytes(os, "data", 4);
  write_pod<uint32_t>(os, data_bytes);
  int64_t clipped = 0;
  for (double v : w.samples) {
    double s = v * 32768.0;
    if (s > 32767.0) {
      s = 32767.0;
      ++clipped;
    } else if (s < -32768.0) {
      s = -32768.0;
      ++clipped;
    }
    write_pod<int16_t>(os, static_cast<int16_t>(std::lrint(s)));
  }
  ensure(os.good(), strcat_("write failed for '", path, "'"));
  return clipped;
}

dsp::Waveform read_wav(const std::string& path) {
  check_little_endian();
  std::ifstream is(path, std::ios::binary);
  ensure(is.good(), strcat_("cannot open '", path, "' for reading"));
  char tag[4];
  read_bytes(is, tag, 4);
  ensure(std::memcmp(tag, "RIFF", 4) == 0, strcat_("'", path, "' is not RIFF"));
  read_pod<uint32_t>(is);  // riff size
  read_bytes(is, tag, 4);
  ensure(std::memcmp(tag, "WAVE", 4) == 0, strcat_("'", path, "' is not WAVE"));

  dsp::Waveform out;
  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  while (is.peek() != EOF) {
    read_bytes(is, tag, 4);
    uint32_t chunk = read_pod<uint32_t>(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      uint16_t fmt = read_pod<uint16_t>(is);
      channels = read_pod<uint16_t>(is);
      out.sample_rate = static_cast<int>(read_pod<uint32_t>(is));
      read_pod<uint32_t>(is);  // byte rate
      read_pod<uint16_t>(is);  // block align
      bits = read_pod<uint16_t>(is);
      ensure(fmt == 1, strcat_("'", path, "': only PCM wavs are supported"));
      ensure(channels == 1, strcat_("'", path, "': only mono wavs are supported"));
      ensure(bits == 16, strcat_("'", path, "': only 16-bit wavs are supported"));
      if (chunk > 16) is.seekg(chunk - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      ensure(have_fmt, strcat_("'", path, "': data before fmt chunk"));
      uint32_t n = chunk / 2;
      out.samples.resize(n);
      for (uint32_t i = 0; i < n; ++i)
        out.samples[i] = static_cast<double>(read_pod<int16_t>(is)) / 32768.0;
      return out;
    } else {
      is.seekg(chunk + (chunk & 1), std::ios::cur);
      ensure(static_cast<bool>(is), strcat_("'", path, "': truncated chunk"));
    }
  }
  throw std::runtime_error(strcat_("'", path, "': no data chunk found"));
}

}  // namespace corpus
}  // namespace dfls
