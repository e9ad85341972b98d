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

#include "mova/synth_corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "json.hpp"
#include "mova/binary_io.hpp"
#include "mova/common.hpp"
#include "mova/wav.hpp"

namespace mova {

namespace {

constexpr std::array<std::array<double, 3>, 6> kVowels{{
    {730, 1090, 2440},
    {530, 1840, 2480},
    {270, 2290, 3010},
    {570, 840, 2410},
    {300, 870, 2240},
    {500, 1500, 2500},
}};

// Two-pole resonator with roughly unit gain at its center frequency.
class Resonator {
 public:
  Resonator(double freq, double bandwidth, double fs) {
    const double r = std::exp(-kPi * bandwidth / fs);
    a1_ = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    a2_ = -r * r;
    gain_ = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(4.0 * kPi * freq / fs) + r * r);
  }
  double operator()(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0.0, a2_ = 0.0, gain_ = 1.0, y1_ = 0.0, y2_ = 0.0;
};

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

SynthVoice synth_voice(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SynthVoice v;
  v.f0 = std::uniform_real_distribution<double>(95.0, 230.0)(rng);
  v.formant_scale = std::uniform_real_distribution<double>(0.88, 1.15)(rng);
  return v;
}

std::vector<double> synthesize_utterance(const SynthVoice& voice, double duration_s, double fs,
                                         std::uint64_t seed) {
  if (!(duration_s > 0.0) || !(fs > 0.0)) throw UsageError("synthesize_utterance: bad duration or rate");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  std::vector<double> out(n, 0.0);
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto pos = static_cast<std::size_t>(uni(0.02, 0.08) * fs);
  while (pos < n) {
    if (uni(0.0, 1.0) < 0.2) pos += static_cast<std::size_t>(uni(0.08, 0.25) * fs);
    if (pos >= n) break;

    std::vector<double> syl;
    if (uni(0.0, 1.0) < 0.5) {
      Resonator hiss(uni(3000.0, 5000.0), 1500.0, fs);
      const auto len = static_cast<std::size_t>(uni(0.03, 0.08) * fs);
      for (std::size_t k = 0; k < len; ++k) syl.push_back(0.3 * hiss(gauss(rng)));
    }

    const auto& vowel = kVowels[static_cast<std::size_t>(uni(0.0, 6.0)) % kVowels.size()];
    Resonator f1(vowel[0] * voice.formant_scale, 80.0, fs);
    Resonator f2(vowel[1] * voice.formant_scale, 100.0, fs);
    Resonator f3(vowel[2] * voice.formant_scale, 140.0, fs);
    const auto len = static_cast<std::size_t>(uni(0.14, 0.32) * fs);
    const double base = voice.f0 * uni(0.9, 1.15);
    const double rate = uni(2.0, 5.0);
    const double offset = uni(0.0, 2.0 * kPi);
    std::vector<double> voiced(len);
    double phase = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double f = base * (1.0 + 0.08 * std::sin(2.0 * kPi * rate * k / fs + offset));
      phase += 2.0 * kPi * f / fs;
      const int harmonics = std::min(40, static_cast<int>(4000.0 / f));
      double src = 0.0;
      for (int h = 1; h <= harmonics; ++h) src += std::sin(h * phase) / h;
      voiced[k] = f3(f2(f1(src)) * 4.0);
    }
    const double level = uni(0.6, 1.0) / std::max(rms(voiced), 1e-12);
    const std::size_t attack = static_cast<std::size_t>(0.02 * fs);
    const std::size_t decay = static_cast<std::size_t>(0.04 * fs);
    for (std::size_t k = 0; k < len; ++k) {
      double env = 1.0;
      if (k < attack) env = 0.5 - 0.5 * std::cos(kPi * k / attack);
      if (k + decay > len) env *= 0.5 - 0.5 * std::cos(kPi * (len - k) / decay);
      syl.push_back(level * env * voiced[k]);
    }

    for (std::size_t k = 0; k < syl.size() && pos + k < n; ++k) out[pos + k] += syl[k];
    pos += syl.size() + static_cast<std::size_t>(uni(0.01, 0.04) * fs);
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= 0.5 / peak;
  }
  return out;
}

void write_synth_corpus(const std::string& dir, const SynthCorpusOptions& options) {
  if (options.num_speakers < 1 || options.utterances_per_speaker < 1)
    throw UsageError("synthetic corpus needs at least one speaker and one utterance");
  namespace fs = std::filesystem;
  nlohmann::json speakers = nlohmann::json::object();
  for (int s = 0; s < options.num_speakers; ++s) {
    char spk[32];
    std::snprintf(spk, sizeof(spk), "spk%02d", s);
    const std::uint64_t speaker_seed = mix_seed(options.seed, static_cast<std::uint64_t>(s));
    const SynthVoice voice = synth_voice(speaker_seed);
    fs::create_directories(fs::path(dir) / spk);
    nlohmann::json list = nlohmann::json::array();
    for (int u = 0; u < options.utterances_per_speaker; ++u) {
      char rel[64];
      std::snprintf(rel, sizeof(rel), "%s/utt%02d.wav", spk, u);
      const auto samples = synthesize_utterance(voice, options.duration_s, options.fs,
                                                mix_seed(speaker_seed, 1000 + static_cast<std::uint64_t>(u)));
      write_wav((fs::path(dir) / rel).string(), Audio::mono(options.fs, samples));
      list.push_back(rel);
    }
    speakers[spk] = list;
  }
  const nlohmann::json index = {{"speakers", speakers}};
  write_file_atomically((fs::path(dir) / "index.json").string(), index.dump(2) + "\n");
}

}  // namespace mova
