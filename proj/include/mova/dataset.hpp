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

// Dataset generation and the JSON manifest that ties the pipeline stages
// together. Scene j of every motion condition shares its seed, so the
// conditions differ only in the motion noise scale.
//
// Layout under the output directory:
//   manifest.json
//   scenes/<id>/mixture.wav              Y, float32
//   scenes/<id>/dry_target.wav           S, float32 mono
//   scenes/<id>/target_trajectory.csv
//   scenes/<id>/interferer_trajectory.csv
//   scenes/<id>/reverberant_target.wav   X (optional)
//   scenes/<id>/interference.wav         V (optional)

#ifndef MOVA_DATASET_HPP_
#define MOVA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mova/dsp.hpp"
#include "mova/scene.hpp"

namespace mova {

struct DatasetConfig {
  std::uint64_t seed = 0;
  std::vector<double> conditions{0.0, 180.0, 360.0};  // deg per 5 s
  std::size_t scenes_per_condition = 10;
  SceneConstraints constraints;
  StftConfig stft;
  DoaGrid grid;
  bool emit_components = false;

  void validate() const;
};

struct SceneFiles {
  std::string mixture;
  std::string dry_target;
  std::string target_trajectory;
  std::string interferer_trajectory;
  std::string reverberant_target;  // empty when not emitted
  std::string interference;        // empty when not emitted
};

struct ManifestEntry {
  std::string id;
  double condition_deg = 0.0;
  double sigma = 0.0;
  double mixing_gain = 1.0;
  SceneSpec spec;
  SceneFiles files;  // relative to the manifest directory
};

struct ManifestFailure {
  std::string id;
  std::string error;
};

struct DatasetManifest {
  double fs = 16000.0;
  StftConfig stft;
  DoaGrid grid;
  std::uint64_t seed = 0;
  std::string corpus;
  std::vector<ManifestEntry> scenes;
  std::vector<ManifestFailure> failures;
  std::filesystem::path base_dir;  // not serialized

  std::string resolve(const std::string& relative) const;
  const ManifestEntry& find(const std::string& id) const;
};

std::string scene_id(double condition_deg, std::size_t index);

nlohmann::json scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const nlohmann::json& j);

// Key order is sorted, numbers round-trip exactly; output is byte-stable.
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

struct GenerateOptions {
  int jobs = 1;
  bool resume = false;   // keep scenes whose files already exist
  bool dry_run = false;  // sample specs only, write nothing
  const RirCache* cache = nullptr;
};

// Per-scene failures are reported in manifest.failures; the manifest is
// always written unless dry_run is set.
DatasetManifest generate_dataset(const DatasetConfig& config, const Corpus& corpus,
                                 const std::string& out_dir, const GenerateOptions& options = {});

// Mixture, dry target and trajectories; X and V when `components` is set.
SceneAudio load_scene(const DatasetManifest& manifest, const ManifestEntry& entry, bool components = false);

}  // namespace mova

#endif  // MOVA_DATASET_HPP_
