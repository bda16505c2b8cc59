// util/rng.h

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

#ifndef DFLS_UTIL_RNG_H_
#define DFLS_UTIL_RNG_H_

#include <cstdint>
#include <string_view>
#include <vector>

namespace dfls {

// Deterministic xoshiro256** generator. We roll our own distributions
// because the std:: ones are implementation-defined and every artifact
// in this toolkit must reproduce bit-identically from a seed.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Derives an independent stream, e.g. Rng::stream(seed, "synth", utt_idx).
  static Rng stream(uint64_t seed, std::string_view tag, uint64_t index = 0);

  uint64_t next_u64();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  int64_t uniform_int(int64_t lo, int64_t hi);  // inclusive bounds
  double gauss();                          // standard normal
  double gamma(double shape);              // Gamma(shape, 1), shape > 0

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dfls

#endif  // DFLS_UTIL_RNG_H_
