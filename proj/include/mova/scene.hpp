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

// Randomized two-speaker scenes with moving sources.
//
// Signal decomposition of a rendered scene (all signals duration * fs long):
//   X = target through the direct path only, every microphone
//   V = (reverberant target - X) + g * reverberant interferer
//   Y = X + V                                   (exact, float32 arithmetic)
//   S = reference channel of X
// X and V are rounded to float32 before Y is formed, so the identity also
// holds for the 32-bit float WAV files written to disk.

#ifndef MOVA_SCENE_HPP_
#define MOVA_SCENE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mova/acoustics.hpp"
#include "mova/common.hpp"
#include "mova/motion.hpp"

namespace mova {

struct CorpusEntry {
  std::string utterance_id;  // path relative to the corpus root
  std::string speaker_id;
  std::string path;          // absolute or root-joined path
  std::size_t num_samples = 0;
  double fs = 0.0;
};

// A directory of mono WAV utterances plus `index.json`:
//   {"speakers": {"<speaker id>": ["relative/path.wav", ...], ...}}
class Corpus {
 public:
  static Corpus load(const std::string& root);
  static Corpus from_entries(std::string root, std::vector<CorpusEntry> entries);

  const std::string& root() const { return root_; }
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  const CorpusEntry& find(const std::string& utterance_id) const;
  Audio load_utterance(const std::string& utterance_id) const;

 private:
  std::string root_;
  std::vector<CorpusEntry> entries_;  // sorted by (speaker_id, utterance_id)
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SceneConstraints {
  Range room_length{5.0, 8.0};
  Range room_width{4.0, 7.0};
  Range room_height{2.5, 3.5};
  Range t60{0.2, 0.5};
  double array_height = 1.5;
  double array_jitter = 0.5;
  double array_radius = 0.05;
  int num_mics = 3;
  Range radius{0.8, 1.2};
  Range speaker_height{1.4, 1.9};
  double min_separation_deg = 10.0;
  double wall_margin = 0.05;
  Range snr_db{-5.0, 5.0};
  double duration = 5.0;
  double fs = 16000.0;
  std::size_t hop = 256;
  int max_retries = 100;

  void validate() const;
};

struct SpeakerSpec {
  std::string utterance_id;
  std::string speaker_id;
  double theta0 = 0.0;  // deg
  double radius = 1.0;  // m
  double height = 1.6;  // m
  std::uint64_t trajectory_seed = 0;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  RoomSpec room;
  ArrayGeometry array;
  SpeakerSpec target;
  SpeakerSpec interferer;
  MotionParams motion;
  double condition_deg = 0.0;  // expected |displacement| per 5 s
  double snr_db = 0.0;
  double duration = 5.0;
  double fs = 16000.0;
  std::size_t hop = 256;

  std::size_t num_samples() const;
  void validate() const;
};

struct SceneAudio {
  Audio mixture;              // Y
  Audio reverberant_target;   // X
  Audio interference;         // V
  Audio dry_target;           // S, mono
  Trajectory target_trajectory;
  Trajectory interferer_trajectory;
  double interferer_gain = 1.0;
};

// Expected-displacement condition (deg per 5 s) to motion noise std.
double sigma_for_condition(double condition_deg, double delta_t);

SceneSpec sample_scene_spec(const Corpus& corpus, const SceneConstraints& constraints,
                            double condition_deg, std::uint64_t seed);

// Mean power over blocks whose energy is within 30 dB of the loudest block.
double active_power(std::span<const double> signal);
// Interferer gain such that the active-power ratio target / (g * interferer) is snr_db.
double mix_gains(std::span<const double> target, std::span<const double> interferer, double snr_db);

Trajectory scene_trajectory(const SceneSpec& spec, const SpeakerSpec& speaker);

struct RenderOptions {
  // Scales the interferer on top of the SNR gain; 0 mutes it.
  double interferer_scale = 1.0;
  // Caps the reflection order of every render; 0 gives an anechoic scene.
  std::optional<int> max_order;
  const RirCache* cache = nullptr;
};

SceneAudio render_scene(const SceneSpec& spec, const Corpus& corpus, const RenderOptions& options = {});
// Same, with the dry utterances supplied directly (first duration * fs samples are used).
SceneAudio render_scene(const SceneSpec& spec, const Audio& target_dry, const Audio& interferer_dry,
                        const RenderOptions& options = {});

}  // namespace mova

#endif  // MOVA_SCENE_HPP_
