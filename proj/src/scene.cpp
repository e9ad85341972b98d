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

#include "mova/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <tuple>

#include "json.hpp"
#include "mova/metrics.hpp"
#include "mova/wav.hpp"

namespace mova {

namespace fs = std::filesystem;

Corpus Corpus::from_entries(std::string root, std::vector<CorpusEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
    return std::tie(a.speaker_id, a.utterance_id) < std::tie(b.speaker_id, b.utterance_id);
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].utterance_id == entries[i - 1].utterance_id)
      throw DataError("corpus: duplicate utterance " + entries[i].utterance_id);
  }
  Corpus c;
  c.root_ = std::move(root);
  c.entries_ = std::move(entries);
  return c;
}

Corpus Corpus::load(const std::string& root) {
  const fs::path index_path = fs::path(root) / "index.json";
  std::ifstream is(index_path);
  if (!is) throw DataError("corpus index not found: " + index_path.string());
  nlohmann::json index;
  try {
    is >> index;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corpus index is not valid JSON: " + std::string(e.what()));
  }
  if (!index.is_object() || !index.contains("speakers") || !index["speakers"].is_object())
    throw DataError("corpus index: expected an object with a 'speakers' map");
  std::vector<CorpusEntry> entries;
  for (const auto& [speaker, paths] : index["speakers"].items()) {
    if (!paths.is_array()) throw DataError("corpus index: speaker '" + speaker + "' must map to a list");
    for (const auto& p : paths) {
      if (!p.is_string()) throw DataError("corpus index: utterance paths must be strings");
      CorpusEntry e;
      e.utterance_id = p.get<std::string>();
      e.speaker_id = speaker;
      e.path = (fs::path(root) / e.utterance_id).string();
      const WavInfo info = read_wav_info(e.path);
      if (info.num_channels != 1) throw DataError("corpus utterance is not mono: " + e.path);
      e.num_samples = info.num_samples;
      e.fs = info.fs;
      entries.push_back(std::move(e));
    }
  }
  return from_entries(root, std::move(entries));
}

const CorpusEntry& Corpus::find(const std::string& utterance_id) const {
  for (const auto& e : entries_) {
    if (e.utterance_id == utterance_id) return e;
  }
  throw DataError("utterance not in corpus: " + utterance_id);
}

Audio Corpus::load_utterance(const std::string& utterance_id) const {
  Audio a = read_wav(find(utterance_id).path);
  if (a.num_channels() != 1) throw DataError("corpus utterance is not mono: " + utterance_id);
  return a;
}

namespace {

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi) || (positive && r.lo <= 0.0))
    throw UsageError(std::string("invalid range for ") + name);
}

// Whole circle of the given radius around `center` lies inside the room.
bool circle_inside(const RoomSpec& room, Vec3 center, double radius, double height, double margin) {
  return center.x - radius >= margin && center.x + radius <= room.dims.x - margin &&
         center.y - radius >= margin && center.y + radius <= room.dims.y - margin &&
         height >= margin && height <= room.dims.z - margin;
}

}  // namespace

void SceneConstraints::validate() const {
  check_range(room_length, "room_length", true);
  check_range(room_width, "room_width", true);
  check_range(room_height, "room_height", true);
  check_range(t60, "t60", true);
  check_range(radius, "radius", true);
  check_range(speaker_height, "speaker_height", true);
  check_range(snr_db, "snr_db", false);
  if (!(duration > 0.0)) throw UsageError("duration must be positive");
  if (!(fs > 0.0)) throw UsageError("fs must be positive");
  if (hop == 0) throw UsageError("hop must be positive");
  if (num_mics < 2) throw UsageError("num_mics must be at least 2");
  if (!(array_radius > 0.0)) throw UsageError("array_radius must be positive");
  if (!(array_jitter >= 0.0)) throw UsageError("array_jitter must be non-negative");
  if (!(min_separation_deg >= 0.0 && min_separation_deg <= 180.0))
    throw UsageError("min_separation_deg must lie in [0, 180]");
  if (max_retries < 1) throw UsageError("max_retries must be at least 1");
}

std::size_t SceneSpec::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration * fs));
}

void SceneSpec::validate() const {
  if (!(duration > 0.0)) throw UsageError("scene duration must be positive");
  if (!(fs > 0.0)) throw UsageError("scene fs must be positive");
  if (hop == 0) throw UsageError("scene hop must be positive");
  room.validate();
  array.validate();
  motion.validate();
  for (const auto& m : array.mic_positions) {
    if (!room.contains(m)) throw UsageError("microphone outside the room");
  }
  for (const SpeakerSpec* s : {&target, &interferer}) {
    if (!(s->radius > 0.0)) throw UsageError("speaker radius must be positive");
    if (!circle_inside(room, array.center(), s->radius, s->height, 0.0))
      throw UsageError("speaker circle leaves the room");
  }
  const std::size_t hops = hops_for_length(num_samples(), hop);
  if (static_cast<std::size_t>(motion.num_frames) + 1 != hops)
    throw UsageError("motion.num_frames must equal the number of hops minus one");
}

double sigma_for_condition(double condition_deg, double delta_t) {
  // Frames fully contained in 5 s (312 at 16 ms).
  const int t = static_cast<int>(std::floor(5.0 / delta_t + 1e-9));
  return sigma_from_displacement(condition_deg, delta_t, t);
}

SceneSpec sample_scene_spec(const Corpus& corpus, const SceneConstraints& c, double condition_deg,
                            std::uint64_t seed) {
  c.validate();
  if (!(condition_deg >= 0.0)) throw UsageError("motion condition must be non-negative");
  const auto needed = static_cast<std::size_t>(std::llround(c.duration * c.fs));

  // Eligible utterances grouped by speaker, in the corpus' sorted order.
  std::vector<std::string> speakers;
  std::vector<std::vector<const CorpusEntry*>> by_speaker;
  for (const auto& e : corpus.entries()) {
    if (e.num_samples < needed || e.fs != c.fs) continue;
    if (speakers.empty() || speakers.back() != e.speaker_id) {
      speakers.push_back(e.speaker_id);
      by_speaker.emplace_back();
    }
    by_speaker.back().push_back(&e);
  }
  if (speakers.size() < 2)
    throw DataError("corpus too small: need utterances of at least " + std::to_string(needed) +
                    " samples at " + std::to_string(c.fs) + " Hz from 2 distinct speakers, found " +
                    std::to_string(speakers.size()));

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  SceneSpec spec;
  spec.seed = seed;
  spec.duration = c.duration;
  spec.fs = c.fs;
  spec.hop = c.hop;
  spec.condition_deg = condition_deg;

  const std::size_t ts = pick(speakers.size());
  std::size_t is = pick(speakers.size() - 1);
  if (is >= ts) ++is;
  const CorpusEntry* tu = by_speaker[ts][pick(by_speaker[ts].size())];
  const CorpusEntry* iu = by_speaker[is][pick(by_speaker[is].size())];
  spec.target.utterance_id = tu->utterance_id;
  spec.target.speaker_id = tu->speaker_id;
  spec.interferer.utterance_id = iu->utterance_id;
  spec.interferer.speaker_id = iu->speaker_id;

  spec.room.dims = {uniform(c.room_length), uniform(c.room_width), uniform(c.room_height)};
  spec.room.t60 = uniform(c.t60);
  const Range jitter{-c.array_jitter, c.array_jitter};
  const Vec3 center{spec.room.dims.x / 2 + uniform(jitter), spec.room.dims.y / 2 + uniform(jitter),
                    c.array_height};
  spec.array = ArrayGeometry::circular(center, c.array_radius, c.num_mics);

  bool ok = false;
  for (int attempt = 0; attempt < c.max_retries && !ok; ++attempt) {
    for (SpeakerSpec* s : {&spec.target, &spec.interferer}) {
      s->theta0 = uniform({0.0, 360.0});
      s->radius = uniform(c.radius);
      s->height = uniform(c.speaker_height);
    }
    ok = angular_error(spec.target.theta0, spec.interferer.theta0) >= c.min_separation_deg &&
         circle_inside(spec.room, center, spec.target.radius, spec.target.height, c.wall_margin) &&
         circle_inside(spec.room, center, spec.interferer.radius, spec.interferer.height, c.wall_margin);
  }
  if (!ok)
    throw DataError("scene constraints unsatisfiable after " + std::to_string(c.max_retries) +
                    " attempts (seed " + std::to_string(seed) + ")");

  spec.target.trajectory_seed = mix_seed(seed, 101);
  spec.interferer.trajectory_seed = mix_seed(seed, 202);
  spec.motion.delta_t = static_cast<double>(c.hop) / c.fs;
  spec.motion.sigma = sigma_for_condition(condition_deg, spec.motion.delta_t);
  spec.motion.num_frames = static_cast<int>(hops_for_length(needed, c.hop)) - 1;
  spec.snr_db = uniform(c.snr_db);
  spec.validate();
  return spec;
}

double active_power(std::span<const double> signal) {
  constexpr std::size_t kBlock = 256;
  std::vector<double> energy;
  for (std::size_t start = 0; start < signal.size(); start += kBlock) {
    const std::size_t end = std::min(signal.size(), start + kBlock);
    double e = 0.0;
    for (std::size_t n = start; n < end; ++n) e += signal[n] * signal[n];
    energy.push_back(e / static_cast<double>(end - start));
  }
  const double peak = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  if (!(peak > 0.0)) throw DataError("silent input: no signal power");
  const double threshold = peak * 1e-3;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < energy.size(); ++b) {
    if (energy[b] < threshold) continue;
    const std::size_t start = b * kBlock;
    const std::size_t end = std::min(signal.size(), start + kBlock);
    for (std::size_t n = start; n < end; ++n) sum += signal[n] * signal[n];
    count += end - start;
  }
  return sum / static_cast<double>(count);
}

double mix_gains(std::span<const double> target, std::span<const double> interferer, double snr_db) {
  if (!std::isfinite(snr_db)) throw UsageError("snr_db must be finite");
  const double pt = active_power(target);
  const double pi = active_power(interferer);
  return std::sqrt(pt / (pi * std::pow(10.0, snr_db / 10.0)));
}

Trajectory scene_trajectory(const SceneSpec& spec, const SpeakerSpec& speaker) {
  return sample_trajectory(CVState{wrap_degrees(speaker.theta0), 0.0}, spec.motion, speaker.trajectory_seed);
}

namespace {

std::vector<double> head(const Audio& a, std::size_t n, const std::string& what) {
  if (a.num_channels() != 1) throw DataError(what + " utterance is not mono");
  if (a.length() < n)
    throw DataError(what + " utterance is shorter than the scene duration (" + std::to_string(a.length()) +
                    " < " + std::to_string(n) + " samples)");
  return {a.channels[0].begin(), a.channels[0].begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

SceneAudio render_scene(const SceneSpec& spec, const Audio& target_dry, const Audio& interferer_dry,
                        const RenderOptions& options) {
  spec.validate();
  if (target_dry.fs != spec.fs || interferer_dry.fs != spec.fs)
    throw DataError("utterance sample rate does not match the scene rate " + std::to_string(spec.fs));
  const std::size_t n = spec.num_samples();
  const Audio t_dry = Audio::mono(spec.fs, head(target_dry, n, "target"));
  const Audio i_dry = Audio::mono(spec.fs, head(interferer_dry, n, "interferer"));
  const double gain = mix_gains(t_dry.channels[0], i_dry.channels[0], spec.snr_db) * options.interferer_scale;

  SceneAudio scene;
  scene.interferer_gain = gain;
  scene.target_trajectory = scene_trajectory(spec, spec.target);
  scene.interferer_trajectory = scene_trajectory(spec, spec.interferer);
  const Vec3 center = spec.array.center();
  const SourcePath tp = make_circular_path(scene.target_trajectory, center, spec.target.radius, spec.target.height);
  const SourcePath ip =
      make_circular_path(scene.interferer_trajectory, center, spec.interferer.radius, spec.interferer.height);

  RirOptions full;
  full.cache = options.cache;
  full.max_order = options.max_order;
  RirOptions direct = full;
  direct.max_order = 0;
  const Audio x_rev = render_moving(spec.room, spec.array, tp, t_dry, spec.hop, full);
  const Audio x_dir = render_moving(spec.room, spec.array, tp, t_dry, spec.hop, direct);
  Audio i_rev;
  if (gain != 0.0) i_rev = render_moving(spec.room, spec.array, ip, i_dry, spec.hop, full);

  const std::size_t mics = spec.array.num_mics();
  scene.reverberant_target = Audio(spec.fs, mics, n);
  scene.interference = Audio(spec.fs, mics, n);
  scene.mixture = Audio(spec.fs, mics, n);
  for (std::size_t m = 0; m < mics; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      double v = x_rev.channels[m][k] - x_dir.channels[m][k];
      if (gain != 0.0) v += gain * i_rev.channels[m][k];
      const float xf = static_cast<float>(x_dir.channels[m][k]);
      const float vf = static_cast<float>(v);
      const float yf = xf + vf;
      scene.reverberant_target.channels[m][k] = xf;
      scene.interference.channels[m][k] = vf;
      scene.mixture.channels[m][k] = yf;
    }
  }
  scene.dry_target = Audio::mono(spec.fs, scene.reverberant_target.channels[spec.array.reference_index]);
  return scene;
}

SceneAudio render_scene(const SceneSpec& spec, const Corpus& corpus, const RenderOptions& options) {
  return render_scene(spec, corpus.load_utterance(spec.target.utterance_id),
                      corpus.load_utterance(spec.interferer.utterance_id), options);
}

}  // namespace mova
