// corpus/wada.cc

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

#include "corpus/wada.h"

#include <algorithm>
#include <cmath>

#include "util/common.h"

namespace dfls {
namespace corpus {

double wada_statistic(const std::vector<double>& samples) {
  require(!samples.empty(), "wada_statistic: empty input");
  double mean_abs = 0.0, mean_log = 0.0;
  for (double v : samples) {
    double a = std::max(std::abs(v), 1e-30);
    mean_abs += a;
    mean_log += std::log(a);
  }
  double n = static_cast<double>(samples.size());
  return std::log(mean_abs / n) - mean_log / n;
}

double gamma_speech_sample(Rng& rng) {
  // E[A^2] = shape*(shape+1) for scale 1; normalize to unit power.
  static const double kScale =
      1.0 / std::sqrt(kWadaSpeechShape * (kWadaSpeechShape + 1.0));
  double a = rng.gamma(kWadaSpeechShape) * kScale;
  return rng.uniform() < 0.5 ? -a : a;
}

WadaTable calibrate_wada_table(int samples_per_point, double step_db, uint64_t seed) {
  require(samples_per_point > 0 && step_db > 0.0, "calibrate_wada_table: bad config");
  WadaTable t;
  std::vector<double> buf(static_cast<size_t>(samples_per_point));
  for (double snr = kWadaSnrMin; snr <= kWadaSnrMax + 1e-9; snr += step_db) {
    Rng rng = Rng::stream(seed, "wada-cal",
                          static_cast<uint64_t>(std::llround((snr - kWadaSnrMin) * 16)));
    double sigma = std::pow(10.0, -snr / 20.0);  // unit speech power
    for (double& v : buf) v = gamma_speech_sample(rng) + sigma * rng.gauss();
    t.snr_db.push_back(snr);
    t.stat.push_back(wada_statistic(buf));
  }
  // Monte-Carlo wiggle breaks strict monotonicity at the flat ends.
  for (size_t i = 1; i < t.stat.size(); ++i)
    t.stat[i] = std::max(t.stat[i], t.stat[i - 1]);
  return t;
}

const WadaTable& wada_table() {
  static const WadaTable table = calibrate_wada_table();
  return table;
}

double snr_from_statistic(double stat, const WadaTable& table) {
  const auto& xs = table.stat;
  const auto& ys = table.snr_db;
  if (stat <= xs.front()) return ys.front();
  if (stat >= xs.back()) return ys.back();
  size_t hi = static_cast<size_t>(
      std::lower_bound(xs.begin(), xs.end(), stat) - xs.begin());
  size_t lo = hi - 1;
  double span = xs[hi] - xs[lo];
  if (span <= 0.0) return ys[lo];
  double f = (stat - xs[lo]) / span;
  return ys[lo] + f * (ys[hi] - ys[lo]);
}

double estimate_snr(const dsp::Waveform& w) {
  require(w.duration_s() >= 0.5, "estimate_snr: need at least 0.5 s of audio");
  double power = 0.0;
  for (double v : w.samples) power += v * v;
  power /= static_cast<double>(w.samples.size());
  require(power > 1e-12, "estimate_snr: silent input");
  return snr_from_statistic(wada_statistic(w.samples), wada_table());
}

}  // namespace corpus
}  // namespace dfls
