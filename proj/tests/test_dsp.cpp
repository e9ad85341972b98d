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
#include <complex>
#include <random>
#include <thread>

#include "doctest.h"
#include "mova/dsp.hpp"
#include "mova/fft.hpp"
#include "mova/synth_corpus.hpp"

using namespace mova;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

// Relative RMS error over [begin, end).
double rel_rms(const std::vector<double>& a, const std::vector<double>& ref, std::size_t begin, std::size_t end) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

// Samples covered by two frames: [hop, frames * hop).
std::size_t interior_end(std::size_t length, const StftConfig& cfg) {
  return std::min(length, stft_num_frames(length, cfg) * cfg.hop);
}

double rel_rms_roundtrip(const std::vector<double>& x) {
  const StftConfig cfg;
  const Audio a = Audio::mono(cfg.fs, x);
  const Audio y = istft(stft(a, cfg), cfg, x.size());
  return rel_rms(y.channels[0], x, cfg.hop, interior_end(x.size(), cfg));
}

}  // namespace

TEST_CASE("window is periodic sqrt-Hann and satisfies COLA at 50% overlap") {
  const auto w = sqrt_hann_window(512);
  CHECK(w[0] == 0.0);
  CHECK(w[256] == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 256; ++i) CHECK(w[i] * w[i] + w[i + 256] * w[i + 256] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("frame count and layout") {
  const StftConfig cfg;
  CHECK(stft_num_frames(80000, cfg) == 312);
  CHECK(stft_num_frames(512, cfg) == 1);
  CHECK(stft_num_frames(513, cfg) == 2);
  const Spectrogram s = stft(Audio::mono(16000.0, white_noise(80000, 1)), cfg);
  CHECK(s.num_frames() == 312);
  CHECK(s.num_bins() == 257);
  CHECK(s.num_channels() == 1);
}

TEST_CASE("a frame equals the direct DFT of the windowed segment") {
  const StftConfig cfg;
  const auto x = white_noise(4000, 3);
  const Spectrogram s = stft(Audio::mono(16000.0, x), cfg);
  const auto w = sqrt_hann_window(512);
  const std::size_t t = 5;
  for (std::size_t k : {0u, 1u, 17u, 128u, 256u}) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < 512; ++n)
      acc += x[t * 256 + n] * w[n] * std::polar(1.0, -2.0 * kPi * double(k) * double(n) / 512.0);
    CHECK(std::abs(s.at(0, t, k) - acc) < 1e-9 * (1.0 + std::abs(acc)));
  }
}

TEST_CASE("bin-centered sinusoid concentrates in its bin") {
  const StftConfig cfg;
  std::vector<double> x(16000);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2.0 * kPi * 32.0 * double(n) / 512.0);
  const Spectrogram s = stft(Audio::mono(16000.0, x), cfg);
  for (std::size_t t = 1; t + 2 < s.num_frames(); ++t) {
    double total = 0.0, near = 0.0;
    for (std::size_t k = 0; k < s.num_bins(); ++k) {
      const double e = std::norm(s.at(0, t, k));
      total += e;
      if (k >= 31 && k <= 33) near += e;
    }
    CHECK(near / total > 0.99);
  }
}

TEST_CASE("zero input gives a zero spectrogram") {
  const Spectrogram s = stft(Audio(16000.0, 2, 3000), StftConfig{});
  for (const auto& v : s.data()) CHECK(v == std::complex<double>(0.0));
}

TEST_CASE("Parseval per frame against direct summation") {
  const StftConfig cfg;
  const auto x = white_noise(80000, 4);
  const Spectrogram s = stft(Audio::mono(16000.0, x), cfg);
  const auto w = sqrt_hann_window(512);
  for (std::size_t t = 0; t < s.num_frames(); t += 7) {
    double time_energy = 0.0;
    for (std::size_t n = 0; n < 512; ++n) {
      const std::size_t idx = t * 256 + n;
      const double v = idx < x.size() ? x[idx] * w[n] : 0.0;
      time_energy += v * v;
    }
    double spec_energy = std::norm(s.at(0, t, 0)) + std::norm(s.at(0, t, 256));
    for (std::size_t k = 1; k < 256; ++k) spec_energy += 2.0 * std::norm(s.at(0, t, k));
    spec_energy /= 512.0;
    CHECK(spec_energy == doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("perfect reconstruction of white noise and speech-like signals") {
  CHECK(rel_rms_roundtrip(white_noise(80000, 9)) <= 1e-6);
  const auto speech = synthesize_utterance(synth_voice(3), 5.0, 16000.0, 11);
  CHECK(rel_rms_roundtrip(speech) <= 1e-6);
  // Odd lengths and multichannel input.
  const StftConfig cfg;
  Audio a(16000.0, 3, 12345);
  for (std::size_t c = 0; c < 3; ++c) a.channels[c] = white_noise(12345, 20 + c);
  const Audio y = istft(stft(a, cfg), cfg, a.length());
  for (std::size_t c = 0; c < 3; ++c) CHECK(rel_rms(y.channels[c], a.channels[c], 256, interior_end(a.length(), cfg)) <= 1e-6);
}

TEST_CASE("stft is linear") {
  const StftConfig cfg;
  const auto x = white_noise(5000, 5), y = white_noise(5000, 6);
  std::vector<double> z(5000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.5 * x[i] - 0.75 * y[i];
  const auto sx = stft(Audio::mono(16000.0, x), cfg), sy = stft(Audio::mono(16000.0, y), cfg);
  const auto sz = stft(Audio::mono(16000.0, z), cfg);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sz.data().size(); ++i) {
    num += std::norm(sz.data()[i] - (2.5 * sx.data()[i] - 0.75 * sy.data()[i]));
    den += std::norm(sz.data()[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("config and input errors") {
  StftConfig bad{512, 128, 16000.0};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  CHECK_THROWS_AS(stft(Audio(16000.0, 1, 0), StftConfig{}), UsageError);
  CHECK_THROWS_AS(stft(Audio(8000.0, 1, 1000), StftConfig{}), UsageError);
  const Spectrogram s = stft(Audio::mono(16000.0, white_noise(2000, 1)), StftConfig{});
  CHECK_THROWS_AS(istft(s, StftConfig{256, 128, 16000.0}), UsageError);
}

TEST_CASE("stft is safe to call concurrently") {
  const auto x = white_noise(40000, 8);
  const Spectrogram ref = stft(Audio::mono(16000.0, x), StftConfig{});
  std::vector<Spectrogram> out(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) threads.emplace_back([&, i] { out[i] = stft(Audio::mono(16000.0, x), StftConfig{}); });
  for (auto& t : threads) t.join();
  for (const auto& s : out) CHECK(s.data() == ref.data());
}

TEST_CASE("DOA encoding") {
  const DoaGrid grid;
  CHECK(encode_doa(0.0, grid).index == 0);
  CHECK(encode_doa(359.9, grid).index == 179);
  CHECK(encode_doa(360.0, grid).index == 0);
  CHECK(encode_doa(-0.5, grid).index == 179);
  CHECK(encode_doa(725.0, grid).index == encode_doa(5.0, grid).index);
  const auto h = encode_doa(91.0, grid);
  CHECK(h.index == 45);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.vector.size(); ++i) {
    sum += h.vector[i];
    CHECK((h.vector[i] == 0.0 || (h.vector[i] == 1.0 && static_cast<int>(i) == h.index)));
  }
  CHECK(sum == 1.0);
  CHECK_THROWS_AS(encode_doa(std::nan(""), grid), UsageError);
}

TEST_CASE("DOA decoding and quantization bound") {
  const DoaGrid grid;
  CHECK(decode_doa(0, grid) == 1.0);
  CHECK(decode_doa(90, grid) == 181.0);
  CHECK_THROWS_AS(decode_doa(180, grid), UsageError);
  CHECK_THROWS_AS(decode_doa(-1, grid), UsageError);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int k = 0; k < 10000; ++k) {
    const double th = u(rng);
    const double back = decode_doa(encode_doa(th, grid).index, grid);
    double d = std::fmod(std::abs(back - th), 360.0);
    d = std::min(d, 360.0 - d);
    CHECK(d <= 1.0 + 1e-9);
    CHECK(encode_doa(th, grid).index == encode_doa(th + 360.0, grid).index);
  }
  CHECK_THROWS_AS((DoaGrid{100, 2.0}.validate()), UsageError);
}
