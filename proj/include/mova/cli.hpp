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

// Pipeline commands behind the `mova` executable. Every command validates
// its inputs before writing anything and returns a process exit code.
//
// Per-scene files produced by the stages, keyed by scene id:
//   track:    <out>/<id>_track.csv, <out>/<id>_posterior.bin
//   extract:  <out>/<id>_est.wav
//   evaluate: <out>/scenes.csv, summary.csv, summary.json
//             (+ plot_tracking.csv, plot_extraction.csv with --plot-data)
// External posteriors and masks are read from <dir>/<id>_posterior.bin and
// <dir>/<id>_mask.bin.

#ifndef MOVA_CLI_HPP_
#define MOVA_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mova/dataset.hpp"
#include "mova/extraction.hpp"
#include "mova/synth_corpus.hpp"
#include "mova/tracking.hpp"

namespace mova {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitPartial = 3 };

// Settings read from a JSON config file; unknown keys are rejected.
//   {"seed": 0, "jobs": 1,
//    "simulate": {"conditions": [...], "scenes_per_condition": 10, "emit_components": false,
//                 "duration": 5, "fs": 16000, "hop": 256, "window_len": 512,
//                 "num_regions": 180, "room_length": [lo, hi], ...},
//    "track": {"tracker": "das-pf", "num_particles": 500, "beta": 5, ...},
//    "extract": {"gate_deg": 20, "mask_max": 2}}
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  DatasetConfig dataset;
  std::string tracker = "das-pf";
  PfConfig pf;
  ExtractionOptions extraction;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig read_run_config(const std::string& path);

struct ParamOptions {
  double displacement_deg = 0.0;
  double delta_t = 0.016;
  int frames = 312;
  int monte_carlo = 0;  // trajectories; 0 skips the check
  std::uint64_t seed = 0;
};
int cmd_param(const ParamOptions& options, std::ostream& out);

struct SimulateOptions {
  std::string corpus_dir;
  std::string out_dir;
  RunConfig config;
  bool resume = false;
  bool dry_run = false;
};
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

struct TrackOptions {
  std::string manifest;
  std::string out_dir;
  RunConfig config;  // tracker, pf, seed, jobs
};
int cmd_track(const TrackOptions& options, std::ostream& out, std::ostream& err);

struct ExtractOptions {
  std::string manifest;
  std::string tracks_dir;  // required for oracle-gated
  std::string mask_source = "oracle-gated";  // or external:<dir>
  std::string out_dir;
  bool force = false;
  RunConfig config;  // extraction, jobs
};
int cmd_extract(const ExtractOptions& options, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
  std::string manifest;
  std::string tracks_dir;     // optional
  std::string extracted_dir;  // optional
  bool unprocessed = false;   // score the mixture reference channel
  bool voiced_only = false;
  bool plot_data = false;
  double margin_deg = 5.0;
  std::string out_dir;
};
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

struct CorpusOptions {
  std::string out_dir;
  SynthCorpusOptions synth;
};
int cmd_corpus(const CorpusOptions& options, std::ostream& out);

// Parses argv and dispatches; exceptions map to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mova

#endif  // MOVA_CLI_HPP_
