// Copyright 2026 The mova Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mova/extraction.hpp"
#include "mova/metrics.hpp"
#include "mova/tracking.hpp"
#include "test_support.hpp"

using namespace mova;
using mova::testing::white_noise;

namespace {

const StftConfig kCfg;

double rel_rms(const std::vector<double>& a, const std::vector<double>& ref, std::size_t begin, std::size_t end) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

Mask random_mask(std::size_t frames, std::size_t bins, std::uint64_t seed) {
  const auto re = white_noise(frames * bins, seed);
  const auto im = white_noise(frames * bins, seed + 1);
  Mask m(frames, bins);
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = {re[i], im[i]};
  return m;
}

const SceneAudio& moving_scene() {
  static const SceneAudio scene = [] {
    const Corpus& corpus = mova::testing::small_corpus();
    const SceneSpec spec = sample_scene_spec(corpus, mova::testing::short_constraints(), 180.0, 5);
    return render_scene(spec, corpus);
  }();
  return scene;
}

}  // namespace

TEST_CASE("all-ones mask reproduces the reference channel") {
  const auto x = white_noise(20000, 1);
  const Spectrogram s = stft(Audio::mono(16000.0, x), kCfg);
  const Audio y = apply_mask(s, Mask(s.num_frames(), s.num_bins(), 1.0), kCfg, x.size());
  REQUIRE(y.length() == x.size());
  const std::size_t end = std::min(x.size(), s.num_frames() * kCfg.hop);
  CHECK(rel_rms(y.channels[0], x, kCfg.hop, end) <= 1e-6);
}

TEST_CASE("all-zeros mask gives silence") {
  const auto x = white_noise(8000, 2);
  const Spectrogram s = stft(Audio::mono(16000.0, x), kCfg);
  const Audio y = apply_mask(s, Mask(s.num_frames(), s.num_bins(), 0.0), kCfg, x.size());
  for (double v : y.channels[0]) CHECK(v == 0.0);
}

TEST_CASE("apply_mask is linear in the mask") {
  const auto x = white_noise(8000, 3);
  const Spectrogram s = stft(Audio::mono(16000.0, x), kCfg);
  const Mask a = random_mask(s.num_frames(), s.num_bins(), 10);
  const Mask b = random_mask(s.num_frames(), s.num_bins(), 20);
  Mask sum = a;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += b.values[i];
  const auto ya = apply_mask(s, a, kCfg, x.size()).channels[0];
  const auto yb = apply_mask(s, b, kCfg, x.size()).channels[0];
  const auto ys = apply_mask(s, sum, kCfg, x.size()).channels[0];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    num += (ys[i] - ya[i] - yb[i]) * (ys[i] - ya[i] - yb[i]);
    den += ys[i] * ys[i];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("apply_mask shape errors") {
  const Spectrogram s = stft(Audio::mono(16000.0, white_noise(4000, 4)), kCfg);
  CHECK_THROWS_AS(apply_mask(s, Mask(s.num_frames() + 1, s.num_bins(), 1.0), kCfg), UsageError);
  CHECK_THROWS_AS(apply_mask(s, Mask(s.num_frames(), s.num_bins() - 1, 1.0), kCfg), UsageError);
  Audio two(16000.0, 2, 4000);
  const Spectrogram s2 = stft(two, kCfg);
  CHECK_THROWS_AS(apply_mask(s2, Mask(s2.num_frames(), s2.num_bins(), 1.0), kCfg), UsageError);
}

TEST_CASE("oracle mask equals one when the mixture is the target") {
  const auto x = white_noise(16000, 5);
  const Audio a = Audio::mono(16000.0, x);
  const Mask m = oracle_complex_mask(a, a, 0, kCfg);
  const Spectrogram s = stft(a, kCfg);
  double peak = 0.0;
  for (const auto& v : s.data()) peak = std::max(peak, std::abs(v));
  for (std::size_t t = 0; t < m.frames; ++t)
    for (std::size_t k = 0; k < m.bins; ++k)
      if (std::abs(s.at(0, t, k)) > 1e-6 * peak) CHECK(std::abs(m.at(t, k) - 1.0) < 1e-9);
}

TEST_CASE("mask magnitudes are clipped") {
  const auto s = white_noise(16000, 6);
  const auto n = white_noise(16000, 7);
  std::vector<double> y(s.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.3 * s[i] + n[i];
  for (double cap : {1.0, 2.0, 5.0}) {
    const Mask m = oracle_complex_mask(Audio::mono(16000.0, s), Audio::mono(16000.0, y), 0, kCfg, cap);
    double peak = 0.0;
    for (const auto& v : m.values) peak = std::max(peak, std::abs(v));
    CHECK(peak <= cap * (1.0 + 1e-12));
    CHECK(peak > 0.9 * cap);
  }
  Mask bad(2, 2, 1.0);
  bad.values[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(bad.clip(), DataError);
  Mask big(1, 2, {3.0, 4.0});
  big.clip(2.0);
  CHECK(std::abs(big.values[0]) == doctest::Approx(2.0));
  CHECK(std::arg(big.values[0]) == doctest::Approx(std::atan2(4.0, 3.0)));
}

TEST_CASE("oracle extraction improves on the mixture") {
  const SceneAudio& scene = moving_scene();
  const std::size_t ref = 0;
  const Mask m = oracle_complex_mask(scene, ref, kCfg);
  const Audio est = apply_mask(stft(Audio::mono(16000.0, scene.mixture.channels[ref]), kCfg), m, kCfg, scene.mixture.length());
  const double sdr = si_sdr(est.channels[0], scene.dry_target.channels[0]);
  const double mix = si_sdr(scene.mixture.channels[ref], scene.dry_target.channels[0]);
  CHECK(sdr > mix + 10.0);
  CHECK(sdr >= 10.0);
}

TEST_CASE("oracle cue reproduces plain oracle extraction") {
  const SceneAudio& scene = moving_scene();
  const Mask m = oracle_complex_mask(scene, 0, kCfg);
  const Audio plain = apply_mask(stft(Audio::mono(16000.0, scene.mixture.channels[0]), kCfg), m, kCfg, scene.mixture.length());
  const DoaEstimateTrack cue = oracle_track(scene.target_trajectory, DoaGrid{});
  const ExtractionResult r = cue_conditioned_extract(scene, 0, cue, kCfg);
  CHECK(r.estimate.channels[0] == plain.channels[0]);
  CHECK(r.mask.values == m.values);
}

TEST_CASE("a cue far from the target silences the estimate") {
  const SceneAudio& scene = moving_scene();
  DoaEstimateTrack cue = oracle_track(scene.target_trajectory, DoaGrid{});
  for (auto& th : cue.thetas) th = wrap_degrees(th + 90.0);
  const ExtractionResult r = cue_conditioned_extract(scene, 0, cue, kCfg);
  const double sdr = si_sdr(r.estimate.channels[0], scene.dry_target.channels[0]);
  CHECK(sdr < -20.0);

  // A cue that is partly wrong lands between the two bounds.
  DoaEstimateTrack half = oracle_track(scene.target_trajectory, DoaGrid{});
  for (std::size_t t = half.size() / 2; t < half.size(); ++t) half.thetas[t] = wrap_degrees(half.thetas[t] + 90.0);
  const double mid = si_sdr(cue_conditioned_extract(scene, 0, half, kCfg).estimate.channels[0],
                            scene.dry_target.channels[0]);
  const double full = si_sdr(cue_conditioned_extract(scene, 0, oracle_track(scene.target_trajectory, DoaGrid{}), kCfg)
                                 .estimate.channels[0],
                             scene.dry_target.channels[0]);
  CHECK(mid > sdr);
  CHECK(mid < full);
}

TEST_CASE("cue frame-count mismatch and external masks") {
  const SceneAudio& scene = moving_scene();
  DoaEstimateTrack cue = oracle_track(scene.target_trajectory, DoaGrid{});
  cue.thetas.pop_back();
  cue.confidence.pop_back();
  CHECK_THROWS_AS(cue_conditioned_extract(scene, 0, cue, kCfg), DataError);

  const DoaEstimateTrack good = oracle_track(scene.target_trajectory, DoaGrid{});
  const Spectrogram y0 = stft(Audio::mono(16000.0, scene.mixture.channels[0]), kCfg);
  const Mask ones(y0.num_frames(), y0.num_bins(), 1.0);
  const ExtractionResult r = cue_conditioned_extract(scene, 0, good, kCfg, {}, &ones);
  const std::size_t end = std::min(scene.mixture.length(), y0.num_frames() * kCfg.hop);
  CHECK(rel_rms(r.estimate.channels[0], scene.mixture.channels[0], kCfg.hop, end) <= 1e-6);
  const Mask wrong(y0.num_frames() - 1, y0.num_bins(), 1.0);
  CHECK_THROWS(cue_conditioned_extract(scene, 0, good, kCfg, {}, &wrong));
}

TEST_CASE("mask file round trip") {
  const auto dir = mova::testing::scratch_dir("mask_io");
  const std::string path = (dir / "m.bin").string();
  Mask m = random_mask(7, 257, 30);
  for (auto& v : m.values) v = {static_cast<float>(v.real()), static_cast<float>(v.imag())};
  write_mask(path, m);
  CHECK(std::filesystem::file_size(path) == 16 + 7 * 257 * 8);
  const Mask back = read_mask(path);
  CHECK(back.frames == 7);
  CHECK(back.bins == 257);
  CHECK(back.values == m.values);
  std::filesystem::resize_file(path, 16 + 6 * 257 * 8);
  CHECK_THROWS_AS(read_mask(path), DataError);
  {
    std::ofstream os(path, std::ios::binary);
    os << "MOVAPG1";
    os.put('\0');
  }
  CHECK_THROWS_AS(read_mask(path), DataError);
  std::filesystem::remove_all(dir);
}
