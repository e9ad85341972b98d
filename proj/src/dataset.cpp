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

#include "mova/dataset.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "mova/binary_io.hpp"
#include "mova/wav.hpp"

namespace mova {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetConfig::validate() const {
  constraints.validate();
  stft.validate();
  grid.validate();
  if (conditions.empty()) throw UsageError("at least one motion condition is required");
  for (double c : conditions) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw UsageError("motion conditions must be finite and >= 0");
  }
  if (scenes_per_condition == 0) throw UsageError("scenes_per_condition must be positive");
  if (stft.fs != constraints.fs) throw UsageError("stft.fs must equal the scene sample rate");
  if (stft.hop != constraints.hop) throw UsageError("stft.hop must equal the rendering hop");
}

std::string DatasetManifest::resolve(const std::string& relative) const {
  return (base_dir / relative).string();
}

const ManifestEntry& DatasetManifest::find(const std::string& id) const {
  for (const auto& e : scenes) {
    if (e.id == id) return e;
  }
  throw DataError("scene not in manifest: " + id);
}

std::string scene_id(double condition_deg, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "scene_%g_%04zu", condition_deg, index);
  return buf;
}

namespace {

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("manifest: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json speaker_json(const SpeakerSpec& s) {
  return {{"utterance_id", s.utterance_id}, {"speaker_id", s.speaker_id}, {"theta0", s.theta0},
          {"radius", s.radius},             {"height", s.height},         {"trajectory_seed", s.trajectory_seed}};
}

SpeakerSpec speaker_from(const json& j) {
  SpeakerSpec s;
  s.utterance_id = j.at("utterance_id").get<std::string>();
  s.speaker_id = j.at("speaker_id").get<std::string>();
  s.theta0 = j.at("theta0").get<double>();
  s.radius = j.at("radius").get<double>();
  s.height = j.at("height").get<double>();
  s.trajectory_seed = j.at("trajectory_seed").get<std::uint64_t>();
  return s;
}

}  // namespace

json scene_spec_to_json(const SceneSpec& spec) {
  json mics = json::array();
  for (const auto& m : spec.array.mic_positions) mics.push_back(vec3_json(m));
  return {
      {"seed", spec.seed},
      {"room", {{"dims", vec3_json(spec.room.dims)}, {"t60", spec.room.t60}, {"speed_of_sound", spec.room.speed_of_sound}}},
      {"array", {{"mics", mics}, {"reference_index", spec.array.reference_index}}},
      {"target", speaker_json(spec.target)},
      {"interferer", speaker_json(spec.interferer)},
      {"motion", {{"sigma", spec.motion.sigma}, {"delta_t", spec.motion.delta_t}, {"num_frames", spec.motion.num_frames}}},
      {"condition_deg", spec.condition_deg},
      {"snr_db", spec.snr_db},
      {"duration", spec.duration},
      {"fs", spec.fs},
      {"hop", spec.hop},
  };
}

SceneSpec scene_spec_from_json(const json& j) {
  try {
    SceneSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& room = j.at("room");
    s.room.dims = vec3_from(room.at("dims"));
    s.room.t60 = room.at("t60").get<double>();
    s.room.speed_of_sound = room.at("speed_of_sound").get<double>();
    for (const auto& m : j.at("array").at("mics")) s.array.mic_positions.push_back(vec3_from(m));
    s.array.reference_index = j.at("array").at("reference_index").get<std::size_t>();
    s.target = speaker_from(j.at("target"));
    s.interferer = speaker_from(j.at("interferer"));
    const auto& motion = j.at("motion");
    s.motion.sigma = motion.at("sigma").get<double>();
    s.motion.delta_t = motion.at("delta_t").get<double>();
    s.motion.num_frames = motion.at("num_frames").get<int>();
    s.condition_deg = j.at("condition_deg").get<double>();
    s.snr_db = j.at("snr_db").get<double>();
    s.duration = j.at("duration").get<double>();
    s.fs = j.at("fs").get<double>();
    s.hop = j.at("hop").get<std::size_t>();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: malformed scene spec: ") + e.what());
  }
}

std::string manifest_to_json(const DatasetManifest& m) {
  json scenes = json::array();
  for (const auto& e : m.scenes) {
    json files = {{"mixture", e.files.mixture},
                  {"dry_target", e.files.dry_target},
                  {"target_trajectory", e.files.target_trajectory},
                  {"interferer_trajectory", e.files.interferer_trajectory}};
    if (!e.files.reverberant_target.empty()) files["reverberant_target"] = e.files.reverberant_target;
    if (!e.files.interference.empty()) files["interference"] = e.files.interference;
    scenes.push_back({{"id", e.id},
                      {"condition_deg_per_5s", e.condition_deg},
                      {"sigma", e.sigma},
                      {"mixing_gain", e.mixing_gain},
                      {"spec", scene_spec_to_json(e.spec)},
                      {"files", files}});
  }
  json failures = json::array();
  for (const auto& f : m.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  const json doc = {
      {"format", "mova-dataset-1"},
      {"fs", m.fs},
      {"seed", m.seed},
      {"corpus", m.corpus},
      {"stft", {{"window_len", m.stft.window_len}, {"hop", m.stft.hop}, {"fs", m.stft.fs}}},
      {"grid", {{"num_regions", m.grid.num_regions}, {"resolution", m.grid.resolution}}},
      {"scenes", scenes},
      {"failures", failures},
  };
  return doc.dump(2) + "\n";
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw DataError("manifest is not valid JSON: " + std::string(e.what()));
  }
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path();
  try {
    if (doc.at("format").get<std::string>() != "mova-dataset-1") throw DataError("manifest: unknown format");
    m.fs = doc.at("fs").get<double>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.corpus = doc.at("corpus").get<std::string>();
    m.stft.window_len = doc.at("stft").at("window_len").get<std::size_t>();
    m.stft.hop = doc.at("stft").at("hop").get<std::size_t>();
    m.stft.fs = doc.at("stft").at("fs").get<double>();
    m.grid.num_regions = doc.at("grid").at("num_regions").get<int>();
    m.grid.resolution = doc.at("grid").at("resolution").get<double>();
    for (const auto& e : doc.at("scenes")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.condition_deg = e.at("condition_deg_per_5s").get<double>();
      entry.sigma = e.at("sigma").get<double>();
      entry.mixing_gain = e.at("mixing_gain").get<double>();
      entry.spec = scene_spec_from_json(e.at("spec"));
      const auto& f = e.at("files");
      entry.files.mixture = f.at("mixture").get<std::string>();
      entry.files.dry_target = f.at("dry_target").get<std::string>();
      entry.files.target_trajectory = f.at("target_trajectory").get<std::string>();
      entry.files.interferer_trajectory = f.at("interferer_trajectory").get<std::string>();
      entry.files.reverberant_target = f.value("reverberant_target", "");
      entry.files.interference = f.value("interference", "");
      m.scenes.push_back(std::move(entry));
    }
    for (const auto& f : doc.at("failures"))
      m.failures.push_back({f.at("id").get<std::string>(), f.at("error").get<std::string>()});
  } catch (const json::exception& e) {
    throw DataError("manifest: " + std::string(e.what()));
  }
  m.stft.validate();
  m.grid.validate();
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  write_file_atomically(path, manifest_to_json(manifest));
}

namespace {

SceneFiles files_for(const std::string& id, bool components) {
  const std::string dir = "scenes/" + id + "/";
  SceneFiles f;
  f.mixture = dir + "mixture.wav";
  f.dry_target = dir + "dry_target.wav";
  f.target_trajectory = dir + "target_trajectory.csv";
  f.interferer_trajectory = dir + "interferer_trajectory.csv";
  if (components) {
    f.reverberant_target = dir + "reverberant_target.wav";
    f.interference = dir + "interference.wav";
  }
  return f;
}

bool all_exist(const fs::path& base, const SceneFiles& f) {
  for (const std::string* p : {&f.mixture, &f.dry_target, &f.target_trajectory, &f.interferer_trajectory,
                               &f.reverberant_target, &f.interference}) {
    if (!p->empty() && !fs::exists(base / *p)) return false;
  }
  return true;
}

void write_csv_atomically(const fs::path& path, const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  write_file_atomically(path.string(), os.str());
}

struct Job {
  std::string id;
  double condition = 0.0;
  std::uint64_t seed = 0;
};

using Outcome = std::variant<ManifestEntry, ManifestFailure>;

Outcome run_job(const Job& job, const DatasetConfig& config, const Corpus& corpus, const fs::path& base,
                const GenerateOptions& options) {
  try {
    ManifestEntry entry;
    entry.id = job.id;
    entry.condition_deg = job.condition;
    entry.spec = sample_scene_spec(corpus, config.constraints, job.condition, job.seed);
    entry.sigma = entry.spec.motion.sigma;
    entry.files = files_for(job.id, config.emit_components);
    const std::size_t n = entry.spec.num_samples();
    if (options.dry_run || (options.resume && all_exist(base, entry.files))) {
      const Audio t = corpus.load_utterance(entry.spec.target.utterance_id);
      const Audio i = corpus.load_utterance(entry.spec.interferer.utterance_id);
      if (t.length() < n || i.length() < n) throw DataError("utterance shorter than the scene duration");
      entry.mixing_gain = mix_gains(std::span(t.channels[0]).first(n), std::span(i.channels[0]).first(n),
                                    entry.spec.snr_db);
      return entry;
    }
    RenderOptions ro;
    ro.cache = options.cache;
    const SceneAudio scene = render_scene(entry.spec, corpus, ro);
    entry.mixing_gain = scene.interferer_gain;
    fs::create_directories(base / "scenes" / job.id);
    write_wav((base / entry.files.mixture).string(), scene.mixture);
    write_wav((base / entry.files.dry_target).string(), scene.dry_target);
    if (config.emit_components) {
      write_wav((base / entry.files.reverberant_target).string(), scene.reverberant_target);
      write_wav((base / entry.files.interference).string(), scene.interference);
    }
    write_csv_atomically(base / entry.files.target_trajectory, scene.target_trajectory);
    write_csv_atomically(base / entry.files.interferer_trajectory, scene.interferer_trajectory);
    return entry;
  } catch (const std::exception& e) {
    return ManifestFailure{job.id, e.what()};
  }
}

}  // namespace

DatasetManifest generate_dataset(const DatasetConfig& config, const Corpus& corpus, const std::string& out_dir,
                                 const GenerateOptions& options) {
  config.validate();
  if (options.jobs < 1) throw UsageError("jobs must be at least 1");
  const fs::path base(out_dir);
  if (!options.dry_run) {
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec || !fs::is_directory(base)) throw DataError("cannot create output directory: " + out_dir);
  }

  std::vector<Job> jobs;
  for (double c : config.conditions) {
    for (std::size_t j = 0; j < config.scenes_per_condition; ++j)
      jobs.push_back({scene_id(c, j), c, mix_seed(config.seed, j)});
  }

  std::vector<std::optional<Outcome>> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < jobs.size(); k = next++)
      outcomes[k] = run_job(jobs[k], config, corpus, base, options);
  };
  const int nthreads = std::min<int>(options.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> threads;
  for (int t = 1; t < nthreads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  DatasetManifest m;
  m.fs = config.constraints.fs;
  m.stft = config.stft;
  m.grid = config.grid;
  m.seed = config.seed;
  m.corpus = corpus.root();
  m.base_dir = base;
  for (auto& o : outcomes) {
    if (auto* e = std::get_if<ManifestEntry>(&*o)) {
      m.scenes.push_back(std::move(*e));
    } else {
      m.failures.push_back(std::get<ManifestFailure>(*o));
    }
  }
  if (!options.dry_run) write_manifest((base / "manifest.json").string(), m);
  return m;
}

SceneAudio load_scene(const DatasetManifest& manifest, const ManifestEntry& entry, bool components) {
  SceneAudio s;
  s.mixture = read_wav(manifest.resolve(entry.files.mixture));
  s.dry_target = read_wav(manifest.resolve(entry.files.dry_target));
  const double dt = entry.spec.motion.delta_t;
  s.target_trajectory = read_trajectory_csv(manifest.resolve(entry.files.target_trajectory), dt);
  s.interferer_trajectory = read_trajectory_csv(manifest.resolve(entry.files.interferer_trajectory), dt);
  s.interferer_gain = entry.mixing_gain;
  if (components) {
    if (entry.files.reverberant_target.empty() || entry.files.interference.empty())
      throw DataError("scene " + entry.id + " was generated without X/V components");
    s.reverberant_target = read_wav(manifest.resolve(entry.files.reverberant_target));
    s.interference = read_wav(manifest.resolve(entry.files.interference));
  }
  const std::size_t n = entry.spec.num_samples();
  if (s.mixture.length() != n || s.dry_target.length() != n)
    throw DataError("scene " + entry.id + ": audio length does not match the manifest");
  if (s.dry_target.num_channels() != 1) throw DataError("scene " + entry.id + ": dry target must be mono");
  return s;
}

}  // namespace mova
