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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mova/fft.hpp"
#include "mova/metrics.hpp"
#include "mova/synth_corpus.hpp"
#include "mova/tracking.hpp"

using namespace mova;

namespace {

constexpr double kFs = 16000.0;
constexpr double kC = 343.0;

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

// Far-field plane wave from azimuth `theta_deg`: mic m observes
// s(t + <p_m - center, u> / c), realized as an exact circular delay.
Audio plane_wave(const std::vector<double>& s, const ArrayGeometry& arr, double theta_deg) {
  const std::size_t n = s.size();
  RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.num_bins()), shifted(fft.num_bins());
  fft.forward(s, spec);
  const double th = theta_deg * kPi / 180.0;
  const Vec3 u{std::cos(th), std::sin(th), 0.0};
  const Vec3 c = arr.center();
  Audio out(kFs, arr.num_mics(), n);
  for (std::size_t m = 0; m < arr.num_mics(); ++m) {
    const Vec3 p = arr.mic_positions[m] - c;
    const double advance = (p.x * u.x + p.y * u.y + p.z * u.z) / kC;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double f = static_cast<double>(k) * kFs / static_cast<double>(n);
      shifted[k] = spec[k] * std::polar(1.0, 2.0 * kPi * f * advance);
    }
    if (n % 2 == 0) shifted.back() = std::complex<double>(shifted.back().real(), 0.0);
    fft.inverse(shifted, out.channels[m]);
    for (auto& v : out.channels[m]) v /= static_cast<double>(n);
  }
  return out;
}

const ArrayGeometry kArray = ArrayGeometry::default_preset({3.0, 2.5, 1.5});

Spectrogram plane_wave_spec(double theta_deg, std::uint64_t seed, std::size_t n = 32768) {
  return stft(plane_wave(white_noise(n, seed), kArray, theta_deg), StftConfig{});
}

double median_ae(const DoaEstimateTrack& track, double truth, std::size_t burn_in) {
  std::vector<double> e;
  for (std::size_t t = burn_in; t < track.size(); ++t) e.push_back(angular_error(track.thetas[t], truth));
  return quantile(e, 0.5);
}

MotionParams motion_for(double disp, std::size_t frames) {
  return {sigma_from_displacement(disp, 0.016, 312), 0.016, static_cast<int>(frames)};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mova_test_" + name)).string();
}

void check_rows_normalized(const PosteriorGrid& g) {
  for (std::size_t t = 0; t < g.num_frames(); ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.num_regions(); ++i) {
      REQUIRE(g.row(t)[i] >= 0.0);
      sum += g.row(t)[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}

}  // namespace

TEST_CASE("DAS map peaks at the plane-wave direction") {
  const DoaGrid grid;
  for (double theta : {90.0, 17.0, 200.0, 331.0}) {
    const Spectrogram spec = plane_wave_spec(theta, 1);
    const SteeredPowerMap map = das_power_map(spec, kArray, grid);
    REQUIRE(map.frames == spec.num_frames());
    std::size_t hits = 0;
    for (std::size_t t = 0; t < map.frames; ++t) {
      const double* r = map.row(t);
      const int best = static_cast<int>(std::max_element(r, r + grid.num_regions) - r);
      if (angular_error(grid.center(best), theta) <= 2.0) ++hits;
      for (int i = 0; i < grid.num_regions; ++i) REQUIRE((std::isfinite(r[i]) && r[i] >= 0.0));
    }
    CHECK(static_cast<double>(hits) >= 0.99 * static_cast<double>(map.frames));
  }
}

TEST_CASE("DAS map of spatially white noise is flat") {
  Audio a(kFs, 3, 48000);
  for (std::size_t m = 0; m < 3; ++m) a.channels[m] = white_noise(48000, 10 + m);
  const DoaGrid grid;
  const SteeredPowerMap map = das_power_map(stft(a, StftConfig{}), kArray, grid);
  std::vector<double> avg(grid.num_regions, 0.0);
  for (std::size_t t = 0; t < map.frames; ++t)
    for (int i = 0; i < grid.num_regions; ++i) avg[i] += map.row(t)[i];
  const auto [lo, hi] = std::minmax_element(avg.begin(), avg.end());
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("DAS map scales quadratically with the input") {
  const Spectrogram spec = plane_wave_spec(61.0, 2, 8192);
  Spectrogram scaled = spec;
  for (auto& v : scaled.data()) v *= 3.0;
  const DoaGrid grid;
  const auto a = das_power_map(spec, kArray, grid);
  const auto b = das_power_map(scaled, kArray, grid);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] == doctest::Approx(9.0 * a.values[i]).epsilon(1e-12));
  for (std::size_t t = 0; t < a.frames; ++t)
    CHECK(std::max_element(a.row(t), a.row(t) + 180) - a.row(t) == std::max_element(b.row(t), b.row(t) + 180) - b.row(t));
}

TEST_CASE("DAS map input errors") {
  const DoaGrid grid;
  const Spectrogram mono = stft(Audio::mono(kFs, white_noise(4000, 3)), StftConfig{});
  ArrayGeometry one;
  one.mic_positions = {{1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(das_power_map(mono, one, grid), UsageError);
  const Spectrogram spec = plane_wave_spec(10.0, 3, 4096);
  CHECK_THROWS_AS(das_power_map(spec, kArray, grid, {3000.0, 2000.0}), UsageError);
  CHECK_THROWS_AS(das_power_map(spec, kArray, grid, {100.0, 9000.0}), UsageError);
}

TEST_CASE("particle filter tracks a static anechoic source") {
  const double theta0 = 140.0;
  const auto speech = synthesize_utterance(synth_voice(5), 5.0, kFs, 6);
  const Vec3 c = kArray.center();
  const double th = theta0 * kPi / 180.0;
  const Vec3 src = c + Vec3{std::cos(th), std::sin(th), 0.0};
  RoomSpec room{{6.0, 5.0, 3.0}, 0.3};
  RirOptions opt;
  opt.max_order = 0;
  const Audio y = render_static(simulate_rir(room, kArray, src, kFs, opt), Audio::mono(kFs, speech));
  const Spectrogram spec = stft(y, StftConfig{});
  const MotionParams motion = motion_for(90.0, spec.num_frames());
  PfConfig cfg;
  cfg.seed = 1;
  const PfResult r1 = pf_track(spec, theta0, motion, cfg, kArray, DoaGrid{});
  REQUIRE(r1.track.size() == spec.num_frames());
  const double m1 = median_ae(r1.track, theta0, 20);
  CHECK(m1 <= 2.0);
  check_rows_normalized(r1.posterior);

  const PfResult again = pf_track(spec, theta0, motion, cfg, kArray, DoaGrid{});
  CHECK(again.track.thetas == r1.track.thetas);
  CHECK(again.posterior.values() == r1.posterior.values());

  for (std::uint64_t seed : {2u, 3u, 4u}) {
    cfg.seed = seed;
    const PfResult r = pf_track(spec, theta0, motion, cfg, kArray, DoaGrid{});
    CHECK(std::abs(median_ae(r.track, theta0, 20) - m1) < 2.0);
  }
}

TEST_CASE("silent input falls back to prediction") {
  const Spectrogram silent(3, 100, 257, StftConfig{});
  PfConfig cfg;
  const PfResult r = pf_track(silent, 33.0, {0.0, 0.016, 100}, cfg, kArray, DoaGrid{});
  CHECK(r.diagnostics.degenerate_frames.size() == 100);
  for (double th : r.track.thetas) CHECK(angular_error(th, 33.0) <= 2.0);
  check_rows_normalized(r.posterior);
  // With motion noise the estimate diffuses but stays finite.
  const PfResult d = pf_track(silent, 33.0, motion_for(90.0, 100), cfg, kArray, DoaGrid{});
  for (double th : d.track.thetas) CHECK((std::isfinite(th) && th >= 0.0 && th < 360.0));
}

TEST_CASE("source at 359 degrees is tracked across the wrap") {
  const Spectrogram spec = plane_wave_spec(359.0, 7, 80000);
  const PfResult r = pf_track(spec, 359.0, motion_for(90.0, spec.num_frames()), PfConfig{}, kArray, DoaGrid{});
  for (std::size_t t = 0; t < r.track.size(); ++t) {
    CHECK(angular_error(r.track.thetas[t], 359.0) <= 3.0);
    CHECK(r.track.thetas[t] >= 0.0);
    CHECK(r.track.thetas[t] < 360.0);
    if (t > 0) CHECK(angular_error(r.track.thetas[t], r.track.thetas[t - 1]) <= 2.0 + 3.0);
  }
  const DoaEstimateTrack map = map_decode(r.posterior);
  for (double th : map.thetas) CHECK(angular_error(th, 359.0) <= 3.0);
}

TEST_CASE("pf config validation") {
  PfConfig c;
  c.num_particles = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = PfConfig{};
  c.resample_ess_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), UsageError);
  const Spectrogram spec = plane_wave_spec(10.0, 3, 4096);
  CHECK_THROWS_AS(pf_track(spec, std::nan(""), motion_for(0.0, spec.num_frames()), PfConfig{}, kArray, DoaGrid{}),
                  UsageError);
}

TEST_CASE("map_decode: one-hot rows, ties and monotone invariance") {
  const DoaGrid grid;
  PosteriorGrid g(8, grid, 100.0);
  for (std::size_t t = 0; t < 8; ++t) g.row(t)[(10 * t + 3) % 180] = 1.0;
  const auto d = map_decode(g);
  for (std::size_t t = 0; t < 8; ++t) CHECK(d.thetas[t] == grid.center(static_cast<int>((10 * t + 3) % 180)));
  CHECK(d.confidence[0] == 1.0);

  // Uniform row after peaked rows keeps the previous estimate.
  PosteriorGrid u(7, grid, 0.0);
  for (std::size_t t = 0; t < 5; ++t) u.row(t)[60] = 1.0;
  for (std::size_t t = 5; t < 7; ++t)
    for (int i = 0; i < 180; ++i) u.row(t)[i] = 1.0 / 180.0;
  const auto du = map_decode(u);
  CHECK(du.thetas[5] == grid.center(60));
  CHECK(du.thetas[6] == grid.center(60));

  // First-frame ties resolve toward theta0.
  PosteriorGrid first(1, grid, 271.0);
  first.row(0)[10] = 0.5;
  first.row(0)[135] = 0.5;
  CHECK(map_decode(first).thetas[0] == grid.center(135));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PosteriorGrid r(20, grid, 0.0);
  for (std::size_t t = 0; t < 20; ++t) {
    double s = 0.0;
    for (int i = 0; i < 180; ++i) s += (r.row(t)[i] = uni(rng));
    for (int i = 0; i < 180; ++i) r.row(t)[i] /= s;
  }
  const auto base = map_decode(r).thetas;
  PosteriorGrid cubed = r, permuted = r;
  for (std::size_t t = 0; t < 20; ++t) {
    double s = 0.0;
    for (int i = 0; i < 180; ++i) s += (cubed.row(t)[i] = std::pow(r.row(t)[i], 3.0) + 1e-9);
    for (int i = 0; i < 180; ++i) cubed.row(t)[i] /= s;
    double* row = permuted.row(t);
    const int best = static_cast<int>(std::max_element(row, row + 180) - row);
    std::swap(row[best], row[179]);
    std::shuffle(row, row + 179, rng);
    std::swap(row[best], row[179]);
  }
  CHECK(map_decode(cubed).thetas == base);
  CHECK(map_decode(permuted).thetas == base);
}

TEST_CASE("oracle track and posterior") {
  const DoaGrid grid;
  Trajectory flat;
  flat.thetas.assign(11, 90.0);
  flat.displacement.assign(11, 0.0);
  const auto t = oracle_track(flat, grid);
  REQUIRE(t.size() == 10);
  for (double th : t.thetas) CHECK((th == 89.0 || th == 91.0));

  const Trajectory moving = sample_trajectory({350.0, 0.0}, motion_for(360.0, 312), 3);
  const auto o = oracle_track(moving, grid);
  CHECK(frame_accuracy(o, moving) == 1.0);
  const auto truth = frame_truth(moving);
  for (std::size_t i = 0; i < o.size(); ++i) CHECK(angular_error(o.thetas[i], truth[i]) <= 1.0 + 1e-9);
  const PosteriorGrid post = oracle_posterior(moving, grid);
  check_rows_normalized(post);
  CHECK(map_decode(post).thetas == o.thetas);
}

TEST_CASE("posterior grid file round trip and validation") {
  const DoaGrid grid;
  PosteriorGrid g(5, grid, 12.0);
  for (std::size_t t = 0; t < 5; ++t) {
    g.row(t)[t] = 0.5;
    g.row(t)[t + 1] = 0.25;
    g.row(t)[179 - t] = 0.125;
    g.row(t)[100] = 0.125;
  }
  const std::string path = temp_path("posterior.bin");
  write_posterior_grid(path, g);
  CHECK(std::filesystem::file_size(path) == 16 + 5 * 180 * 4);
  const PosteriorGrid back = read_posterior_grid(path, 12.0);
  CHECK(back.num_frames() == 5);
  CHECK(back.num_regions() == 180);
  CHECK(back.values() == g.values());
  {
    std::ifstream is(path, std::ios::binary);
    char magic[8];
    is.read(magic, 8);
    CHECK(std::string(magic, 7) == "MOVAPG1");
    CHECK(magic[7] == '\0');
  }

  // Corrupted magic.
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.put('X');
  }
  CHECK_THROWS_AS(read_posterior_grid(path), DataError);

  // Truncated body.
  write_posterior_grid(path, g);
  std::filesystem::resize_file(path, 16 + 4 * 180 * 4 + 10);
  try {
    read_posterior_grid(path);
    CHECK(false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("frame-count mismatch") != std::string::npos);
  }

  // Slightly off rows are renormalized, badly off rows rejected.
  PosteriorGrid off = g;
  for (int i = 0; i < 180; ++i) off.row(2)[i] *= 1.00002;
  write_posterior_grid(path, off);
  const PosteriorGrid fixed = read_posterior_grid(path);
  check_rows_normalized(fixed);
  for (int i = 0; i < 180; ++i) off.row(2)[i] *= 1.001;
  write_posterior_grid(path, off);
  CHECK_THROWS_AS(read_posterior_grid(path), DataError);
  PosteriorGrid neg = g;
  neg.row(1)[50] = -0.25;
  neg.row(1)[51] = 0.25;
  write_posterior_grid(path, neg);
  CHECK_THROWS_AS(read_posterior_grid(path), DataError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_posterior_grid(path), DataError);
}

TEST_CASE("track CSV round trip") {
  const DoaEstimateTrack t{{0.0, 359.5, 12.25}, {1.0, 0.5, 0.125}};
  std::stringstream ss;
  write_track_csv(ss, t);
  CHECK(ss.str().rfind("frame,theta_deg,confidence\n", 0) == 0);
  const auto back = read_track_csv(ss);
  CHECK(back.thetas == t.thetas);
  CHECK(back.confidence == t.confidence);
  std::stringstream bad("frame,theta_deg,confidence\n0,1,1\n2,1,1\n");
  CHECK_THROWS_AS(read_track_csv(bad), DataError);
}
