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

// Fixtures shared by the scene-level tests.

#ifndef MOVA_TESTS_TEST_SUPPORT_HPP_
#define MOVA_TESTS_TEST_SUPPORT_HPP_

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mova/scene.hpp"
#include "mova/synth_corpus.hpp"

namespace mova::testing {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

// Fresh per-process scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mova_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Small synthetic corpus: 4 speakers x 2 utterances of 6 s.
inline const Corpus& small_corpus() {
  static const Corpus corpus = [] {
    const auto dir = scratch_dir("corpus_" + std::to_string(::getpid()));
    SynthCorpusOptions opt;
    opt.num_speakers = 4;
    opt.utterances_per_speaker = 2;
    write_synth_corpus(dir.string(), opt);
    return Corpus::load(dir.string());
  }();
  return corpus;
}

inline SceneConstraints short_constraints(double duration = 2.0) {
  SceneConstraints c;
  c.duration = duration;
  return c;
}

}  // namespace mova::testing

#endif  // MOVA_TESTS_TEST_SUPPORT_HPP_
