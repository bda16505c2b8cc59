// tests/test_corpus.cc

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "corpus/augment.h"
#include "corpus/manifest.h"
#include "corpus/mix.h"
#include "corpus/pairs.h"
#include "corpus/synth.h"
#include "corpus/wada.h"
#include "corpus/wav_io.h"
#include "dsp/feature_io.h"

using namespace dfls;
using namespace dfls::corpus;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("tmp_test") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

dsp::Waveform constant_rms_tone(double rms, double seconds = 1.0) {
  dsp::Waveform w;
  w.samples.resize(static_cast<size_t>(seconds * 16000));
  double amp = rms * std::sqrt(2.0);
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = amp * std::sin(2.0 * M_PI * 220.0 * static_cast<double>(i) / 16000.0);
  return w;
}

double mean_power(const std::vector<double>& x) {
  double p = 0;
  for (double v : x) p += v * v;
  return p / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("wav round trip") {
  TempDir dir("wav");
  Rng rng(9);
  dsp::Waveform w;
  w.samples.resize(4000);
  for (auto& s : w.samples) s = rng.uniform(-0.9, 0.9);
  std::string path = (dir.path / "x.wav").string();
  int64_t clipped = write_wav(w, path);
  CHECK(clipped == 0);
  auto r = read_wav(path);
  REQUIRE(r.samples.size() == w.samples.size());
  CHECK(r.sample_rate == 16000);
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(r.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-3));
}

TEST_CASE("manifest validation and round trip") {
  TempDir dir("manifest");
  Manifest m;
  ManifestRecord clean{"utt1", "a.wav", "spk1", Kind::kClean, {}, {}, {}, {}, 3.0};
  ManifestRecord noisy{"utt1n", "b.wav", "spk1", Kind::kNoisy,
                       "utt1",  "music", 12.5,   {},           3.0};
  m.push_back(clean);
  m.push_back(noisy);
  std::string path = (dir.path / "m.jsonl").string();
  save_manifest(m, path);
  auto r = load_manifest(path);
  REQUIRE(r.size() == 2);
  CHECK(r[1].parent_id == "utt1");
  CHECK(r[1].noise_class == "music");
  CHECK(r[1].snr_db == doctest::Approx(12.5));

  SUBCASE("duplicate ids rejected") {
    m.push_back(clean);
    CHECK_THROWS_AS(validate_manifest(m), std::invalid_argument);
  }
  SUBCASE("corrupted record without parent rejected") {
    Manifest bad = {ManifestRecord{"x", "x.wav", "s", Kind::kNoisy, {}, "music", 5.0, {}, 1.0}};
    CHECK_THROWS_AS(validate_manifest(bad), std::invalid_argument);
  }
}

TEST_CASE("synth_corpus determinism and bookkeeping") {
  TempDir dir1("synth1");
  TempDir dir2("synth2");
  SyntheticSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 3;
  spec.utt_duration_s = 1.0;
  spec.seed = 7;
  auto m1 = synth_corpus(spec, dir1.str());
  auto m2 = synth_corpus(spec, dir2.str());
  CHECK(m1.size() == 12);
  double total = 0;
  for (const auto& r : m1) total += r.duration_s;
  CHECK(total == doctest::Approx(12.0));
  // Bit-identical WAVs for the same seed.
  for (size_t i = 0; i < m1.size(); ++i) {
    auto a = read_wav(m1[i].path);
    auto b = read_wav(m2[i].path);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t j = 0; j < a.samples.size(); ++j) CHECK(a.samples[j] == b.samples[j]);
  }
}

TEST_CASE("synthetic speakers are spectrally distinguishable") {
  TempDir dir("spk");
  SyntheticSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 2;
  spec.utt_duration_s = 1.5;
  spec.seed = 13;
  auto m = synth_corpus(spec, dir.str());
  // Mean log-spectrum per utterance.
  auto mean_logspec = [](const std::string& path) {
    auto f = dsp::logmelfb(read_wav(path));
    std::vector<double> mu(static_cast<size_t>(f.dim), 0.0);
    for (int64_t d = 0; d < f.dim; ++d) {
      for (int64_t t = 0; t < f.frames; ++t) mu[static_cast<size_t>(d)] += f.at(d, t);
      mu[static_cast<size_t>(d)] /= static_cast<double>(f.frames);
    }
    return mu;
  };
  auto cosine_dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      num += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return 1.0 - num / std::sqrt(na * nb);
  };
  std::vector<std::vector<double>> specs;
  for (const auto& r : m) specs.push_back(mean_logspec(r.path));
  double same = 0, diff = 0;
  int n_same = 0, n_diff = 0;
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = i + 1; j < m.size(); ++j) {
      double d = cosine_dist(specs[i], specs[j]);
      if (m[i].speaker == m[j].speaker) {
        same += d;
        ++n_same;
      } else {
        diff += d;
        ++n_diff;
      }
    }
  CHECK(diff / n_diff > same / n_same);
}

TEST_CASE("mix_at_snr") {
  auto speech = constant_rms_tone(0.1);
  Rng rng(33);
  dsp::Waveform noise;
  noise.samples.resize(speech.samples.size());
  for (auto& s : noise.samples) s = 0.1 * rng.gauss();
  // Normalize the noise to the exact speech RMS over the active region
  // (the tone is fully active).
  double target_rms = std::sqrt(mean_power(speech.samples));
  double noise_rms = std::sqrt(mean_power(noise.samples));
  for (auto& s : noise.samples) s *= target_rms / noise_rms;

  SUBCASE("equal RMS at 0 dB needs scale 1") {
    auto r = mix_at_snr(speech, noise, 0.0);
    CHECK(r.noise_scale == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("20 dB target scales noise amplitude by 0.1") {
    auto r = mix_at_snr(speech, noise, 20.0);
    CHECK(r.noise_scale == doctest::Approx(0.1).epsilon(1e-6));
  }
  SUBCASE("achieved SNR within 0.01 dB across targets") {
    for (double target : {-10.0, -5.0, 0.0, 5.0, 10.0, 20.0, 30.0}) {
      auto r = mix_at_snr(speech, noise, target);
      CHECK(std::abs(r.achieved_snr_db - target) < 0.01);
    }
  }
  SUBCASE("short noise is loop-tiled") {
    dsp::Waveform short_noise;
    short_noise.samples.assign(3000, 0.0);
    Rng rng2(5);
    for (auto& s : short_noise.samples) s = 0.05 * rng2.gauss();
    auto r = mix_at_snr(speech, short_noise, 10.0);
    CHECK(r.mixed.samples.size() == speech.samples.size());
    CHECK(std::abs(r.achieved_snr_db - 10.0) < 0.01);
  }
  SUBCASE("zero-power inputs rejected") {
    dsp::Waveform silent;
    silent.samples.assign(16000, 0.0);
    CHECK_THROWS(mix_at_snr(silent, noise, 0.0));
    CHECK_THROWS(mix_at_snr(speech, silent, 0.0));
  }
}

TEST_CASE("convolve_rir") {
  auto speech = constant_rms_tone(0.1, 0.5);
  SUBCASE("unit impulse is identity") {
    dsp::Waveform rir;
    rir.samples = {1.0};
    auto out = convolve_rir(speech, rir);
    REQUIRE(out.samples.size() == speech.samples.size());
    for (size_t i = 0; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(speech.samples[i]).epsilon(1e-9));
  }
  SUBCASE("delayed impulse shifts the signal") {
    dsp::Waveform rir;
    rir.samples.assign(11, 0.0);
    rir.samples[10] = 1.0;
    auto out = convolve_rir(speech, rir);
    for (size_t i = 10; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(speech.samples[i - 10]).epsilon(1e-6));
  }
  SUBCASE("reverberation slows autocorrelation decay") {
    Rng rng(71);
    dsp::Waveform burst;
    burst.samples.assign(16000, 0.0);
    for (size_t i = 0; i < 16000; ++i)
      burst.samples[i] = rng.gauss() * ((i / 800) % 2 == 0 ? 0.3 : 0.0);
    auto rir = synth_rir(0.5, 0.4, 3);
    auto wet = convolve_rir(burst, rir);
    auto autocorr_at = [](const std::vector<double>& x, int lag) {
      double num = 0, den = 0;
      for (size_t i = 0; i + lag < x.size(); ++i) {
        num += x[i] * x[i + lag];
        den += x[i] * x[i];
      }
      return std::abs(num) / den;
    };
    int lag = 1200;
    CHECK(autocorr_at(wet.samples, lag) > autocorr_at(burst.samples, lag));
  }
  SUBCASE("empty rir rejected") {
    dsp::Waveform rir;
    CHECK_THROWS_AS(convolve_rir(speech, rir), std::invalid_argument);
  }
}

TEST_CASE("synth_rir") {
  auto rir = synth_rir(0.5, 0.6, 11);
  SUBCASE("tail envelope decays 60 dB at rt60") {
    // RMS in a small window near t=0 (excluding the direct impulse) vs at rt60.
    auto rms_at = [&](double t_s) {
      size_t c = static_cast<size_t>(t_s * 16000);
      double s = 0;
      int n = 0;
      for (size_t i = c; i < c + 400 && i < rir.samples.size(); ++i, ++n)
        s += rir.samples[i] * rir.samples[i];
      return std::sqrt(s / n);
    };
    double early = rms_at(0.005);
    double late = rms_at(0.5);
    double ratio = late / early;
    double expected = std::exp(-6.9) / std::exp(-6.9 * 0.005 / 0.5);
    CHECK(ratio == doctest::Approx(expected).epsilon(0.5));
    CHECK(ratio < 5e-3);
  }
  SUBCASE("tiny rt60 approaches a bare impulse") {
    auto tight = synth_rir(0.002, 0.2, 11);
    double tail = 0;
    for (size_t i = 1; i < tight.samples.size(); ++i) tail += tight.samples[i] * tight.samples[i];
    CHECK(tail < 0.01);  // direct path carries energy 1
  }
  SUBCASE("deterministic under seed") {
    auto again = synth_rir(0.5, 0.6, 11);
    for (size_t i = 0; i < rir.samples.size(); ++i)
      CHECK(rir.samples[i] == again.samples[i]);
  }
}

TEST_CASE("WADA-style SNR estimation") {
  // Model-matched oracle signals: Gamma(0.4) speech plus Gaussian noise.
  auto make_mixture = [](double snr_db, uint64_t seed, size_t n = 24000) {
    dsp::Waveform w;
    w.samples.resize(n);
    Rng rng(seed);
    double sigma = std::pow(10.0, -snr_db / 20.0);
    for (auto& s : w.samples) s = gamma_speech_sample(rng) + sigma * rng.gauss();
    return w;
  };
  SUBCASE("true 10 dB estimated within +-3 dB") {
    CHECK(std::abs(estimate_snr(make_mixture(10.0, 1)) - 10.0) < 3.0);
  }
  SUBCASE("pure speech-model signal reads >= 30 dB") {
    dsp::Waveform w;
    w.samples.resize(24000);
    Rng rng(2);
    for (auto& s : w.samples) s = gamma_speech_sample(rng);
    CHECK(estimate_snr(w) >= 30.0);
  }
  SUBCASE("pure gaussian noise reads <= 0 dB") {
    dsp::Waveform w;
    w.samples.resize(24000);
    Rng rng(3);
    for (auto& s : w.samples) s = 0.1 * rng.gauss();
    CHECK(estimate_snr(w) <= 0.0);
  }
  SUBCASE("silent or too-short input rejected") {
    dsp::Waveform w;
    w.samples.assign(16000, 0.0);
    CHECK_THROWS(estimate_snr(w));
    w.samples.assign(4000, 0.1);
    CHECK_THROWS(estimate_snr(w));
  }
}

TEST_CASE("snr_filter_top_fraction") {
  Manifest m;
  std::map<std::string, double> est;
  for (int i = 0; i < 4; ++i) {
    ManifestRecord r;
    r.id = strcat_("u", i);
    r.path = "unused.wav";
    r.speaker = "s";
    r.kind = Kind::kClean;
    r.duration_s = 1.0;
    m.push_back(r);
  }
  est["u0"] = 5;
  est["u1"] = 10;
  est["u2"] = 15;
  est["u3"] = 20;
  SUBCASE("keeps the top half") {
    auto f = snr_filter_top_fraction(m, 0.5, est);
    REQUIRE(f.size() == 2);
    CHECK(f[0].id == "u3");
    CHECK(f[1].id == "u2");
  }
  SUBCASE("fraction 1.0 is identity") {
    CHECK(snr_filter_top_fraction(m, 1.0, est).size() == 4);
  }
  SUBCASE("ceil rounding on odd counts") {
    ManifestRecord r;
    r.id = "u4";
    r.path = "unused.wav";
    r.speaker = "s";
    r.kind = Kind::kClean;
    r.duration_s = 1.0;
    m.push_back(r);
    est["u4"] = 1;
    CHECK(snr_filter_top_fraction(m, 0.5, est).size() == 3);
  }
  SUBCASE("kept estimates dominate dropped ones") {
    auto f = snr_filter_top_fraction(m, 0.5, est);
    double min_kept = 1e9;
    for (const auto& r : f) min_kept = std::min(min_kept, est[r.id]);
    CHECK(min_kept >= 15.0);
  }
}

TEST_CASE("build_augmented_corpus") {
  TempDir dir("aug");
  SyntheticSpec spec;
  spec.n_speakers = 2;
  spec.utts_per_speaker = 2;
  spec.utt_duration_s = 1.0;
  spec.seed = 3;
  auto clean = synth_corpus(spec, (dir.path / "clean").string());
  NoiseSpec nspec;
  nspec.files_per_class = 2;
  nspec.duration_s = 1.2;
  nspec.seed = 4;
  auto noises = synth_noise_inventory(nspec, (dir.path / "noise").string());
  RirSpec rspec;
  rspec.count = 2;
  rspec.seed = 5;
  auto rirs = synth_rir_inventory(rspec, (dir.path / "rir").string());

  SUBCASE("three copies per clean record") {
    AugmentConfig cfg;
    cfg.classes = {"noise", "music", "babble", "chime3bg"};
    cfg.copies = 3;
    cfg.seed = 6;
    auto aug = build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "out").string());
    CHECK(aug.size() == clean.size() * 3);
    validate_manifest(aug);
  }
  SUBCASE("single-class set tags everything with that class") {
    AugmentConfig cfg;
    cfg.classes = {"music"};
    cfg.copies = 2;
    cfg.seed = 6;
    auto aug = build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "out2").string());
    for (const auto& r : aug) CHECK(r.noise_class == "music");
  }
  SUBCASE("leave-one-out set never emits the held-out class") {
    AugmentConfig cfg;
    cfg.classes = {"noise", "music", "babble"};
    cfg.copies = 3;
    cfg.seed = 6;
    auto aug = build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "out3").string());
    for (const auto& r : aug) CHECK(r.noise_class != "chime3bg");
  }
  SUBCASE("empty class set rejected") {
    AugmentConfig cfg;
    cfg.classes = {};
    CHECK_THROWS_AS(
        build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "out4").string()),
        std::invalid_argument);
  }
}

TEST_CASE("make_training_pairs") {
  TempDir dir("pairs");
  SyntheticSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 5;
  spec.utt_duration_s = 1.0;
  spec.seed = 8;
  auto clean = synth_corpus(spec, (dir.path / "clean").string());
  NoiseSpec nspec;
  nspec.files_per_class = 2;
  nspec.duration_s = 1.2;
  nspec.seed = 9;
  auto noises = synth_noise_inventory(nspec, (dir.path / "noise").string());
  RirSpec rspec;
  rspec.count = 2;
  rspec.seed = 10;
  auto rirs = synth_rir_inventory(rspec, (dir.path / "rir").string());

  SUBCASE("90-10 split by utterance") {
    PairConfig cfg;
    cfg.seed = 11;
    auto pairs = make_training_pairs(clean, noises, rirs, cfg, (dir.path / "p1").string());
    CHECK(pairs.train.size() == 18);
    CHECK(pairs.val.size() == 2);
  }
  SUBCASE("pair features share the frame count") {
    PairConfig cfg;
    cfg.seed = 11;
    auto pairs = make_training_pairs(clean, noises, rirs, cfg, (dir.path / "p2").string());
    auto n = dsp::load_features(pairs.train[0].noisy_feat);
    auto c = dsp::load_features(pairs.train[0].clean_feat);
    CHECK(n.frames == c.frames);
    CHECK(n.dim == 40);
    CHECK(c.dim == 40);
  }
  SUBCASE("dereverb task needs no noise inventory at all") {
    PairConfig cfg;
    cfg.task = "dereverb";
    cfg.seed = 12;
    NoiseInventory empty;
    auto pairs = make_training_pairs(clean, empty, rirs, cfg, (dir.path / "p3").string());
    CHECK(pairs.train.size() + pairs.val.size() == clean.size());
  }
  SUBCASE("mixed task covers all three task tags; both-pairs carry a mid target") {
    PairConfig cfg;
    cfg.task = "mixed";
    cfg.seed = 13;
    auto pairs = make_training_pairs(clean, noises, rirs, cfg, (dir.path / "p4").string());
    int n_denoise = 0, n_dereverb = 0, n_both = 0;
    auto count = [&](const std::vector<TrainingPair>& v) {
      for (const auto& p : v) {
        if (p.task == "denoise") ++n_denoise;
        if (p.task == "dereverb") ++n_dereverb;
        if (p.task == "both") {
          ++n_both;
          CHECK(!p.mid_feat.empty());
          auto midf = dsp::load_features(p.mid_feat);
          auto nf = dsp::load_features(p.noisy_feat);
          CHECK(midf.frames == nf.frames);
        }
      }
    };
    count(pairs.train);
    count(pairs.val);
    CHECK(n_denoise > 0);
    CHECK(n_dereverb > 0);
    CHECK(n_both > 0);
  }
  SUBCASE("higher-dimensional corrupted side") {
    PairConfig cfg;
    cfg.enh_feat_dim = 80;
    cfg.seed = 14;
    auto pairs = make_training_pairs(clean, noises, rirs, cfg, (dir.path / "p5").string());
    auto n = dsp::load_features(pairs.train[0].noisy_feat);
    CHECK(n.dim == 80);
  }
  SUBCASE("pairs round trip") {
    PairConfig cfg;
    cfg.seed = 11;
    auto pairs = make_training_pairs(clean, noises, rirs, cfg, (dir.path / "p6").string());
    save_pairs(pairs, (dir.path / "pairs.jsonl").string());
    auto loaded = load_pairs((dir.path / "pairs.jsonl").string());
    CHECK(loaded.train.size() == pairs.train.size());
    CHECK(loaded.val.size() == pairs.val.size());
    CHECK(loaded.train[0].noisy_feat == pairs.train[0].noisy_feat);
  }
  SUBCASE("fewer than 10 utterances rejected") {
    Manifest tiny(clean.begin(), clean.begin() + 5);
    PairConfig cfg;
    CHECK_THROWS_AS(make_training_pairs(tiny, noises, rirs, cfg, (dir.path / "p7").string()),
                    std::invalid_argument);
  }
}

TEST_CASE("augmented corpora are deterministic under seed") {
  TempDir dir("det");
  SyntheticSpec spec;
  spec.n_speakers = 2;
  spec.utts_per_speaker = 2;
  spec.utt_duration_s = 1.0;
  spec.seed = 21;
  auto clean = synth_corpus(spec, (dir.path / "clean").string());
  NoiseSpec nspec;
  nspec.files_per_class = 2;
  nspec.duration_s = 1.2;
  nspec.seed = 22;
  auto noises = synth_noise_inventory(nspec, (dir.path / "noise").string());
  RirInventory rirs;
  AugmentConfig cfg;
  cfg.classes = {"noise", "music"};
  cfg.copies = 2;
  cfg.seed = 23;
  auto a = build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "a").string());
  auto b = build_augmented_corpus(clean, noises, rirs, cfg, (dir.path / "b").string());
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].noise_class == b[i].noise_class);
    CHECK(a[i].snr_db == b[i].snr_db);
    auto wa = read_wav(a[i].path);
    auto wb = read_wav(b[i].path);
    REQUIRE(wa.samples.size() == wb.samples.size());
    bool same = true;
    for (size_t j = 0; j < wa.samples.size(); ++j)
      same = same && wa.samples[j] == wb.samples[j];
    CHECK(same);
  }
}
