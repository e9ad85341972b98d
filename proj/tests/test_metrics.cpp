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
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "mova/metrics.hpp"

using namespace mova;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

Trajectory constant_trajectory(double theta, std::size_t frames) {
  Trajectory t;
  t.thetas.assign(frames + 1, theta);
  t.displacement.assign(frames + 1, 0.0);
  return t;
}

DoaEstimateTrack constant_track(double theta, std::size_t frames) {
  return {std::vector<double>(frames, theta), std::vector<double>(frames, 1.0)};
}

// Sorted-sample quantile, averaging the two neighbours when n * p is whole.
double type2_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double np = static_cast<double>(v.size()) * p;
  const double j = std::floor(np);
  if (np == j) {
    if (j == 0.0) return v.front();
    if (j >= static_cast<double>(v.size())) return v.back();
    return 0.5 * (v[static_cast<std::size_t>(j) - 1] + v[static_cast<std::size_t>(j)]);
  }
  return v[static_cast<std::size_t>(j)];
}

SceneReport make_report(const std::string& id, double condition, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  SceneReport r;
  r.scene_id = id;
  r.condition = condition;
  const std::size_t frames = 40;
  Trajectory truth = constant_trajectory(100.0, frames);
  DoaEstimateTrack track = constant_track(100.0, frames);
  for (auto& th : track.thetas) th = wrap_degrees(th + u(rng) - 10.0);
  r.tracking = make_tracking_report(track, truth);
  r.extraction = ExtractionReport{u(rng) - 5.0, u(rng)};
  return r;
}

}  // namespace

TEST_CASE("si_sdr caps and scale invariance") {
  const auto ref = white_noise(8000, 1);
  CHECK(si_sdr(ref, ref) == kSiSdrCapDb);
  std::vector<double> scaled(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) scaled[i] = 3.7 * ref[i];
  CHECK(si_sdr(scaled, ref) == kSiSdrCapDb);
  CHECK(si_sdr(std::vector<double>(ref.size(), 0.0), ref) == -kSiSdrCapDb);

  const auto noise = white_noise(8000, 2);
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] + 0.3 * noise[i];
  const double base = si_sdr(est, ref);
  for (double a : {-2.0, 1e-3, 0.5, 7.0, 1e4}) {
    std::vector<double> e(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) e[i] = a * est[i];
    CHECK(std::abs(si_sdr(e, ref) - base) < 1e-9);
  }
}

TEST_CASE("orthogonal noise at equal power gives 0 dB") {
  const auto ref = white_noise(16000, 3);
  auto noise = white_noise(16000, 4);
  double dot = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    dot += noise[i] * ref[i];
    rr += ref[i] * ref[i];
  }
  double nn = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    noise[i] -= dot / rr * ref[i];
    nn += noise[i] * noise[i];
  }
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] + noise[i] * std::sqrt(rr / nn);
  CHECK(std::abs(si_sdr(est, ref)) < 0.1);
}

TEST_CASE("si_sdr errors") {
  const auto ref = white_noise(100, 5);
  CHECK_THROWS_AS(si_sdr(std::vector<double>(99, 1.0), ref), UsageError);
  CHECK_THROWS_AS(si_sdr(ref, std::vector<double>(100, 0.0)), UsageError);
}

TEST_CASE("angular error wraps, is symmetric and bounded") {
  CHECK(angular_error(10.0, 350.0) == doctest::Approx(20.0));
  CHECK(angular_error(123.0, 123.0) == 0.0);
  CHECK(angular_error(0.0, 180.0) == doctest::Approx(180.0));
  CHECK(angular_error(-30.0, 390.0) == doctest::Approx(60.0));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-720.0, 720.0);
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), b = u(rng);
    const double e = angular_error(a, b);
    CHECK(e >= 0.0);
    CHECK(e <= 180.0);
    CHECK(e == doctest::Approx(angular_error(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("frame accuracy margin is inclusive and compares against t + 1") {
  const std::size_t frames = 50;
  const Trajectory truth = constant_trajectory(2.0, frames);
  CHECK(frame_accuracy(constant_track(2.0, frames), truth) == 1.0);
  CHECK(frame_accuracy(constant_track(7.0, frames), truth) == 1.0);
  CHECK(frame_accuracy(constant_track(357.0, frames), truth) == 1.0);
  CHECK(frame_accuracy(constant_track(8.0, frames), truth) == 0.0);
  CHECK_THROWS_AS(frame_accuracy(constant_track(2.0, frames + 1), truth), UsageError);

  // Truth index 0 is the initial state, not a frame.
  Trajectory shifted = truth;
  shifted.thetas[0] = 90.0;
  CHECK(frame_accuracy(constant_track(2.0, frames), shifted) == 1.0);
  shifted.thetas[1] = 90.0;
  CHECK(frame_accuracy(constant_track(2.0, frames), shifted) == doctest::Approx(49.0 / 50.0));
  const auto ft = frame_truth(truth);
  CHECK(ft.size() == frames);
}

TEST_CASE("accuracy is monotone in the margin") {
  const std::size_t frames = 200;
  const Trajectory truth = constant_trajectory(45.0, frames);
  DoaEstimateTrack track = constant_track(45.0, frames);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 15.0);
  for (auto& th : track.thetas) th = wrap_degrees(th + g(rng));
  double prev = 1.0;
  for (double m : {180.0, 40.0, 20.0, 10.0, 5.0, 2.0, 0.5, 0.0}) {
    const double acc = frame_accuracy(track, truth, m);
    CHECK(acc <= prev);
    prev = acc;
  }
}

TEST_CASE("quantiles match the type-2 definition") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == 1.5);
  CHECK(quantile({5.0}, 0.75) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), UsageError);
  for (std::size_t n : {1u, 2u, 5u, 8u, 13u, 100u}) {
    const auto v = white_noise(n, n);
    auto doubled = v;
    doubled.insert(doubled.end(), v.begin(), v.end());
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      CHECK(quantile(v, p) == doctest::Approx(type2_oracle(v, p)).epsilon(1e-15));
      CHECK(quantile(doubled, p) == doctest::Approx(quantile(v, p)).epsilon(1e-15));
    }
  }
}

TEST_CASE("tracking report statistics") {
  const std::size_t frames = 4;
  const Trajectory truth = constant_trajectory(0.0, frames);
  const DoaEstimateTrack track{{1.0, 358.0, 10.0, 20.0}, std::vector<double>(4, 1.0)};
  const TrackingReport r = make_tracking_report(track, truth);
  REQUIRE(r.errors.size() == 4);
  CHECK(r.errors[1] == doctest::Approx(2.0));
  CHECK(r.accuracy == 0.5);
  CHECK(r.median_error == doctest::Approx(6.0));
  CHECK(r.q25_error == doctest::Approx(1.5));
  CHECK(r.q75_error == doctest::Approx(15.0));
  const std::vector<bool> voiced{true, false, true, false};
  const TrackingReport rv = make_tracking_report(track, truth, 5.0, &voiced);
  CHECK(rv.errors.size() == 2);
  CHECK(rv.accuracy == 0.5);
  const std::vector<bool> wrong(3, true);
  CHECK_THROWS_AS(make_tracking_report(track, truth, 5.0, &wrong), UsageError);
}

TEST_CASE("active frames follow the energy threshold") {
  const StftConfig cfg;
  std::vector<double> x(256 * 20, 0.0);
  const auto loud = white_noise(256 * 4, 9);
  std::copy(loud.begin(), loud.end(), x.begin() + 256 * 8);
  const auto act = active_frames(x, cfg);
  REQUIRE(act.size() == stft_num_frames(x.size(), cfg));
  CHECK(act[9]);
  CHECK(!act[0]);
  CHECK(!act[17]);
}

TEST_CASE("extraction report improvement is relative to the mixture") {
  const auto ref = white_noise(8000, 10);
  const auto noise = white_noise(8000, 11);
  std::vector<double> mix(ref.size()), est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    mix[i] = ref[i] + noise[i];
    est[i] = ref[i] + 0.1 * noise[i];
  }
  const ExtractionReport r = make_extraction_report(est, mix, ref);
  CHECK(r.si_sdr == doctest::Approx(si_sdr(est, ref)));
  CHECK(r.si_sdr_improvement == doctest::Approx(si_sdr(est, ref) - si_sdr(mix, ref)));
  CHECK(r.si_sdr_improvement > 15.0);
}

TEST_CASE("aggregate: single report, duplicates and permutations") {
  const SceneReport one = make_report("a", 180.0, 1);
  const auto single = aggregate(std::vector<SceneReport>{one});
  REQUIRE(single.size() == 1);
  CHECK(single[0].condition == 180.0);
  CHECK(single[0].num_scenes == 1);
  CHECK(single[0].accuracy == one.tracking->accuracy);
  CHECK(single[0].median_error == one.tracking->median_error);
  CHECK(single[0].q25_error == one.tracking->q25_error);
  CHECK(single[0].q75_error == one.tracking->q75_error);
  CHECK(single[0].mean_si_sdr == one.extraction->si_sdr);

  std::vector<SceneReport> reports;
  for (int i = 0; i < 9; ++i) reports.push_back(make_report("s" + std::to_string(i), (i % 3) * 180.0, 20 + i));
  const auto base = aggregate(reports);
  REQUIRE(base.size() == 3);
  CHECK(base[0].condition == 0.0);
  CHECK(base[2].condition == 360.0);

  auto doubled = reports;
  doubled.insert(doubled.end(), reports.begin(), reports.end());
  const auto dup = aggregate(doubled);
  const std::string base_json = summaries_to_json(base);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(dup[i].accuracy == doctest::Approx(base[i].accuracy).epsilon(1e-14));
    CHECK(dup[i].median_error == doctest::Approx(base[i].median_error).epsilon(1e-14));
    CHECK(dup[i].q25_error == doctest::Approx(base[i].q25_error).epsilon(1e-14));
    CHECK(dup[i].q75_error == doctest::Approx(base[i].q75_error).epsilon(1e-14));
    CHECK(dup[i].mean_si_sdr == doctest::Approx(base[i].mean_si_sdr).epsilon(1e-14));
  }

  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    auto perm = reports;
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(summaries_to_json(aggregate(perm)) == base_json);
    CHECK(summaries_to_csv(aggregate(perm)) == summaries_to_csv(base));
  }
  CHECK_THROWS_AS(aggregate(std::vector<SceneReport>{}), UsageError);
}

TEST_CASE("summary serialization") {
  std::vector<SceneReport> reports{make_report("x", 0.0, 4), make_report("y", 90.0, 5)};
  const auto s = aggregate(reports);
  const auto j = nlohmann::json::parse(summaries_to_json(s));
  CHECK(j.dump().find("accuracy") != std::string::npos);
  const std::string csv = summaries_to_csv(s);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const std::string scenes = scene_reports_to_csv(reports);
  CHECK(std::count(scenes.begin(), scenes.end(), '\n') == 3);
  CHECK(scenes.find("x,") != std::string::npos);
}
