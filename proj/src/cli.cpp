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

#include "mova/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mova/binary_io.hpp"
#include "mova/metrics.hpp"
#include "mova/wav.hpp"

namespace mova {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads typed values out of a JSON object and rejects keys it never saw.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw UsageError("config: '" + where_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError("config: '" + where_ + "." + key + "' has the wrong type");
    }
  }

  void read_range(const char* key, Range& out) {
    std::vector<double> v{out.lo, out.hi};
    read(key, v);
    if (v.size() != 2) throw UsageError("config: '" + where_ + "." + key + "' must be [lo, hi]");
    out = {v[0], v[1]};
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw UsageError("config: unknown key '" + where_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void parse_simulate(const json& j, DatasetConfig& d) {
  StrictObject o(j, "simulate");
  auto& c = d.constraints;
  o.read("conditions", d.conditions);
  o.read("scenes_per_condition", d.scenes_per_condition);
  o.read("emit_components", d.emit_components);
  o.read("duration", c.duration);
  o.read("fs", c.fs);
  o.read("hop", c.hop);
  o.read("window_len", d.stft.window_len);
  o.read("num_regions", d.grid.num_regions);
  o.read_range("room_length", c.room_length);
  o.read_range("room_width", c.room_width);
  o.read_range("room_height", c.room_height);
  o.read_range("t60", c.t60);
  o.read("array_height", c.array_height);
  o.read("array_jitter", c.array_jitter);
  o.read("array_radius", c.array_radius);
  o.read("num_mics", c.num_mics);
  o.read_range("radius", c.radius);
  o.read_range("speaker_height", c.speaker_height);
  o.read("min_separation_deg", c.min_separation_deg);
  o.read("wall_margin", c.wall_margin);
  o.read_range("snr_db", c.snr_db);
  o.read("max_retries", c.max_retries);
  o.finish();
}

void parse_track(const json& j, RunConfig& rc) {
  StrictObject o(j, "track");
  auto& p = rc.pf;
  o.read("tracker", rc.tracker);
  o.read("num_particles", p.num_particles);
  o.read("beta", p.beta);
  o.read("init_spread_deg", p.init_spread_deg);
  o.read("velocity_init_scale", p.velocity_init_scale);
  o.read("likelihood_floor", p.likelihood_floor);
  o.read("resample_ess_fraction", p.resample_ess_fraction);
  Range band{p.band.lo_hz, p.band.hi_hz};
  o.read_range("band_hz", band);
  p.band = {band.lo, band.hi};
  o.read("speed_of_sound", p.speed_of_sound);
  o.finish();
}

void parse_extract(const json& j, ExtractionOptions& e) {
  StrictObject o(j, "extract");
  o.read("gate_deg", e.gate_deg);
  o.read("mask_max", e.mask_max);
  o.finish();
}

// Keeps the derived STFT/grid settings consistent with the scene settings.
void sync_dataset(DatasetConfig& d) {
  d.stft.fs = d.constraints.fs;
  d.stft.hop = d.constraints.hop;
  if (d.grid.num_regions > 0) d.grid.resolution = 360.0 / d.grid.num_regions;
}

void validate_run_config(const RunConfig& rc) {
  if (rc.jobs < 1) throw UsageError("jobs must be at least 1");
  rc.dataset.validate();
  rc.pf.validate();
  if (!(rc.extraction.gate_deg >= 0.0)) throw UsageError("gate_deg must be non-negative");
  if (!(rc.extraction.mask_max > 0.0)) throw UsageError("mask_max must be positive");
}

// Runs fn(i) for every index on `jobs` threads; returns error text per index.
std::vector<std::string> parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  for (int t = 1; t < count; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return errors;
}

int report_failures(const std::vector<std::string>& ids, const std::vector<std::string>& errors,
                    std::ostream& err) {
  std::size_t failed = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    err << "scene " << ids[i] << ": " << errors[i] << "\n";
    ++failed;
  }
  if (failed == 0) return kExitOk;
  err << failed << " of " << errors.size() << " scenes failed\n";
  return kExitPartial;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// Splits "external:<dir>" into its directory; returns false for other values.
bool external_dir(const std::string& source, std::string& dir) {
  constexpr std::string_view prefix = "external:";
  if (source.rfind(prefix, 0) != 0) return false;
  dir = source.substr(prefix.size());
  if (dir.empty()) throw UsageError("external source needs a directory: external:<dir>");
  return true;
}

std::vector<std::string> scene_ids(const DatasetManifest& m) {
  std::vector<std::string> ids;
  for (const auto& e : m.scenes) ids.push_back(e.id);
  return ids;
}

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig rc;
  StrictObject o(j, "config");
  o.read("seed", rc.seed);
  o.read("jobs", rc.jobs);
  if (const json* s = o.child("simulate")) parse_simulate(*s, rc.dataset);
  if (const json* t = o.child("track")) parse_track(*t, rc);
  if (const json* e = o.child("extract")) parse_extract(*e, rc.extraction);
  o.finish();
  rc.dataset.seed = rc.seed;
  sync_dataset(rc.dataset);
  validate_run_config(rc);
  return rc;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw UsageError("config is not valid JSON: " + std::string(e.what()));
  }
  return run_config_from_json(j);
}

int cmd_param(const ParamOptions& o, std::ostream& out) {
  if (o.monte_carlo < 0) throw UsageError("--monte-carlo must be non-negative");
  const double sigma = sigma_from_displacement(o.displacement_deg, o.delta_t, o.frames);
  MotionParams params{sigma, o.delta_t, o.frames};
  char buf[160];
  std::snprintf(buf, sizeof(buf), "sigma = %.17g\n", sigma);
  out << buf;
  std::snprintf(buf, sizeof(buf), "expected_abs_displacement = %.17g\n",
                expected_abs_displacement(params, o.frames));
  out << buf;
  std::snprintf(buf, sizeof(buf), "check: mova param --disp %.17g --dt %.17g --frames %d --monte-carlo 10000\n",
                o.displacement_deg, o.delta_t, o.frames);
  out << buf;
  if (o.monte_carlo > 0) {
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < o.monte_carlo; ++k) {
      const Trajectory tr = sample_trajectory({0.0, 0.0}, params, mix_seed(o.seed, static_cast<std::uint64_t>(k)));
      const double d = tr.displacement.back();
      sum += std::abs(d);
      sum_sq += d * d;
    }
    const double n = o.monte_carlo;
    std::snprintf(buf, sizeof(buf), "monte_carlo_mean_abs_displacement = %.6f\n", sum / n);
    out << buf;
    std::snprintf(buf, sizeof(buf), "monte_carlo_displacement_variance = %.6f (closed form %.6f)\n", sum_sq / n,
                  displacement_variance(params, o.frames));
    out << buf;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  validate_run_config(o.config);
  if (o.out_dir.empty() && !o.dry_run) throw UsageError("--out is required");
  if (o.corpus_dir.empty()) throw UsageError("--corpus is required");
  if (!fs::is_directory(o.corpus_dir)) throw DataError("missing corpus directory: " + o.corpus_dir);
  const Corpus corpus = Corpus::load(o.corpus_dir);
  const auto cache = RirCache::from_env();
  GenerateOptions g;
  g.jobs = o.config.jobs;
  g.resume = o.resume;
  g.dry_run = o.dry_run;
  g.cache = cache ? &*cache : nullptr;
  const DatasetManifest m = generate_dataset(o.config.dataset, corpus, o.out_dir, g);
  for (const auto& f : m.failures) err << "scene " << f.id << ": " << f.error << "\n";
  if (o.dry_run) {
    out << "dry run: " << m.scenes.size() << " scene specs valid, " << m.failures.size() << " invalid\n";
  } else {
    out << join(o.out_dir, "manifest.json") << "\n";
  }
  if (!m.failures.empty()) {
    err << m.failures.size() << " of " << m.scenes.size() + m.failures.size() << " scenes failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_track(const TrackOptions& o, std::ostream& out, std::ostream& err) {
  validate_run_config(o.config);
  const DatasetManifest m = read_manifest(o.manifest);
  const std::string& tracker = o.config.tracker;
  std::string ext_dir;
  const bool external = external_dir(tracker, ext_dir);
  if (!external && tracker != "das-pf" && tracker != "oracle")
    throw UsageError("unknown tracker '" + tracker + "' (das-pf, oracle, external:<dir>)");
  if (external) {
    std::vector<std::string> missing;
    for (const auto& e : m.scenes) {
      const std::string p = join(ext_dir, e.id + "_posterior.bin");
      if (!fs::exists(p)) missing.push_back(p);
    }
    if (!missing.empty()) {
      for (const auto& p : missing) err << "missing posterior file: " << p << "\n";
      throw DataError(std::to_string(missing.size()) + " posterior files missing");
    }
  }
  ensure_dir(o.out_dir);

  std::vector<PfDiagnostics> diagnostics(m.scenes.size());
  const auto errors = parallel_for(m.scenes.size(), o.config.jobs, [&](std::size_t i) {
    const ManifestEntry& e = m.scenes[i];
    PosteriorGrid posterior;
    DoaEstimateTrack track;
    if (tracker == "das-pf") {
      const Audio mixture = read_wav(m.resolve(e.files.mixture));
      PfConfig pf = o.config.pf;
      pf.seed = mix_seed(e.spec.seed, o.config.seed);
      PfResult r = pf_track(stft(mixture, m.stft), e.spec.target.theta0, e.spec.motion, pf, e.spec.array, m.grid);
      posterior = std::move(r.posterior);
      track = std::move(r.track);
      diagnostics[i] = std::move(r.diagnostics);
    } else if (tracker == "oracle") {
      const Trajectory truth = read_trajectory_csv(m.resolve(e.files.target_trajectory), e.spec.motion.delta_t);
      posterior = oracle_posterior(truth, m.grid);
      track = oracle_track(truth, m.grid);
    } else {
      posterior = read_posterior_grid(join(ext_dir, e.id + "_posterior.bin"), e.spec.target.theta0);
      if (!(posterior.grid() == m.grid))
        throw DataError("posterior grid has " + std::to_string(posterior.grid().num_regions) +
                        " regions, manifest grid has " + std::to_string(m.grid.num_regions));
      const std::size_t frames = stft_num_frames(e.spec.num_samples(), m.stft);
      if (posterior.num_frames() != frames)
        throw DataError("frame-count mismatch: posterior has " + std::to_string(posterior.num_frames()) +
                        " frames, scene has " + std::to_string(frames));
      track = map_decode(posterior);
    }
    write_posterior_grid(join(o.out_dir, e.id + "_posterior.bin"), posterior);
    std::ostringstream csv;
    write_track_csv(csv, track);
    write_file_atomically(join(o.out_dir, e.id + "_track.csv"), csv.str());
  });

  json diag = json::object();
  for (std::size_t i = 0; i < m.scenes.size(); ++i) {
    if (!errors[i].empty()) continue;
    diag[m.scenes[i].id] = {{"degenerate_frames", diagnostics[i].degenerate_frames},
                            {"num_resamples", diagnostics[i].num_resamples}};
  }
  write_file_atomically(join(o.out_dir, "tracking_diagnostics.json"),
                        json{{"tracker", tracker}, {"scenes", diag}}.dump(2) + "\n");
  out << "tracked " << m.scenes.size() << " scenes with " << tracker << "\n";
  return report_failures(scene_ids(m), errors, err);
}

int cmd_extract(const ExtractOptions& o, std::ostream& out, std::ostream& err) {
  validate_run_config(o.config);
  const DatasetManifest m = read_manifest(o.manifest);
  std::string mask_dir;
  const bool external = external_dir(o.mask_source, mask_dir);
  if (!external && o.mask_source != "oracle-gated")
    throw UsageError("unknown mask source '" + o.mask_source + "' (oracle-gated, external:<dir>)");
  if (!external && o.tracks_dir.empty()) throw UsageError("--tracks is required for oracle-gated extraction");
  if (o.out_dir.empty()) throw UsageError("--out is required");

  std::vector<std::string> missing, existing;
  for (const auto& e : m.scenes) {
    if (!o.tracks_dir.empty() && !fs::exists(join(o.tracks_dir, e.id + "_track.csv")))
      missing.push_back(join(o.tracks_dir, e.id + "_track.csv"));
    if (external && !fs::exists(join(mask_dir, e.id + "_mask.bin")))
      missing.push_back(join(mask_dir, e.id + "_mask.bin"));
    if (!o.force && fs::exists(join(o.out_dir, e.id + "_est.wav"))) existing.push_back(e.id + "_est.wav");
  }
  if (!existing.empty()) {
    for (const auto& p : existing) err << "output exists: " << join(o.out_dir, p) << "\n";
    throw UsageError("refusing to overwrite " + std::to_string(existing.size()) + " files without --force");
  }
  if (!missing.empty()) {
    for (const auto& p : missing) err << "missing input: " << p << "\n";
    throw DataError(std::to_string(missing.size()) + " input files missing");
  }
  ensure_dir(o.out_dir);

  const auto errors = parallel_for(m.scenes.size(), o.config.jobs, [&](std::size_t i) {
    const ManifestEntry& e = m.scenes[i];
    const SceneAudio scene = load_scene(m, e);
    const std::size_t ref = e.spec.array.reference_index;
    Audio estimate;
    if (external) {
      const Mask mask = read_mask(join(mask_dir, e.id + "_mask.bin"));
      if (o.tracks_dir.empty()) {
        estimate = apply_mask(stft(Audio::mono(scene.mixture.fs, scene.mixture.channels.at(ref)), m.stft), mask,
                              m.stft, scene.mixture.length());
      } else {
        const auto cue = read_track_csv(join(o.tracks_dir, e.id + "_track.csv"));
        estimate = cue_conditioned_extract(scene, ref, cue, m.stft, o.config.extraction, &mask).estimate;
      }
    } else {
      const auto cue = read_track_csv(join(o.tracks_dir, e.id + "_track.csv"));
      estimate = cue_conditioned_extract(scene, ref, cue, m.stft, o.config.extraction).estimate;
    }
    write_wav(join(o.out_dir, e.id + "_est.wav"), estimate);
  });
  out << "extracted " << m.scenes.size() << " scenes (" << o.mask_source << ")\n";
  return report_failures(scene_ids(m), errors, err);
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const DatasetManifest m = read_manifest(o.manifest);
  if (o.tracks_dir.empty() && o.extracted_dir.empty() && !o.unprocessed)
    throw UsageError("nothing to evaluate: pass --tracks, --extracted or --unprocessed");
  if (o.unprocessed && !o.extracted_dir.empty())
    throw UsageError("--unprocessed and --extracted are mutually exclusive");
  if (!(o.margin_deg >= 0.0)) throw UsageError("--margin must be non-negative");
  ensure_dir(o.out_dir);

  std::vector<std::string> incomplete;
  std::vector<SceneReport> reports;
  for (const auto& e : m.scenes) {
    SceneReport r;
    r.scene_id = e.id;
    r.condition = e.condition_deg;
    std::vector<std::string> problems;
    std::optional<Audio> dry;
    auto load_dry = [&]() -> const Audio& {
      if (!dry) dry = read_wav(m.resolve(e.files.dry_target));
      return *dry;
    };
    if (!o.tracks_dir.empty()) {
      const std::string p = join(o.tracks_dir, e.id + "_track.csv");
      if (!fs::exists(p)) {
        problems.push_back("missing " + p);
      } else {
        const Trajectory truth = read_trajectory_csv(m.resolve(e.files.target_trajectory), e.spec.motion.delta_t);
        const DoaEstimateTrack track = read_track_csv(p);
        std::vector<bool> voiced;
        if (o.voiced_only) voiced = active_frames(load_dry().channels[0], m.stft);
        r.tracking = make_tracking_report(track, truth, o.margin_deg, o.voiced_only ? &voiced : nullptr);
      }
    }
    if (o.unprocessed || !o.extracted_dir.empty()) {
      const std::string p = join(o.extracted_dir, e.id + "_est.wav");
      if (!o.unprocessed && !fs::exists(p)) {
        problems.push_back("missing " + p);
      } else {
        const Audio mixture = read_wav(m.resolve(e.files.mixture));
        const auto& mix_ref = mixture.channels.at(e.spec.array.reference_index);
        const Audio est = o.unprocessed ? Audio::mono(mixture.fs, mix_ref) : read_wav(p);
        if (est.num_channels() != 1 || est.length() != mix_ref.size())
          throw DataError("estimate for " + e.id + " must be mono with the mixture length");
        r.extraction = make_extraction_report(est.channels[0], mix_ref, load_dry().channels[0]);
      }
    }
    for (const auto& p : problems) incomplete.push_back(e.id + ": " + p);
    if (r.tracking || r.extraction) reports.push_back(std::move(r));
  }
  if (reports.empty()) {
    for (const auto& p : incomplete) err << p << "\n";
    throw DataError("no scene could be evaluated");
  }

  const auto summaries = aggregate(reports);
  write_file_atomically(join(o.out_dir, "scenes.csv"), scene_reports_to_csv(reports));
  write_file_atomically(join(o.out_dir, "summary.csv"), summaries_to_csv(summaries));
  write_file_atomically(join(o.out_dir, "summary.json"), summaries_to_json(summaries));
  if (o.plot_data) {
    std::string tracking = "condition_deg,scene_id,frame,abs_error_deg\n";
    std::string extraction = "condition_deg,scene_id,si_sdr_db,si_sdr_improvement_db\n";
    for (const auto& r : reports) {
      const std::string prefix = format_double(r.condition) + "," + r.scene_id + ",";
      if (r.tracking) {
        for (std::size_t t = 0; t < r.tracking->errors.size(); ++t)
          tracking += prefix + std::to_string(t) + "," + format_double(r.tracking->errors[t]) + "\n";
      }
      if (r.extraction)
        extraction += prefix + format_double(r.extraction->si_sdr) + "," +
                      format_double(r.extraction->si_sdr_improvement) + "\n";
    }
    write_file_atomically(join(o.out_dir, "plot_tracking.csv"), tracking);
    write_file_atomically(join(o.out_dir, "plot_extraction.csv"), extraction);
  }
  out << summaries_to_csv(summaries);
  if (!incomplete.empty()) {
    for (const auto& p : incomplete) err << "warning: " << p << "\n";
    err << "warning: partial evaluation, " << incomplete.size() << " inputs missing\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_corpus(const CorpusOptions& o, std::ostream& out) {
  if (o.out_dir.empty()) throw UsageError("--out is required");
  ensure_dir(o.out_dir);
  write_synth_corpus(o.out_dir, o.synth);
  out << join(o.out_dir, "index.json") << "\n";
  return kExitOk;
}

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* app, Overrides& ov) {
  app->add_option("--config", ov.config_path, "JSON config file");
  app->add_option("--seed", ov.seed, "Master seed");
  app->add_option("--jobs", ov.jobs, "Scene-level parallelism");
}

RunConfig resolve(const Overrides& ov) {
  RunConfig rc = ov.config_path.empty() ? RunConfig{} : read_run_config(ov.config_path);
  if (ov.seed) rc.seed = *ov.seed;
  if (ov.jobs) rc.jobs = *ov.jobs;
  rc.dataset.seed = rc.seed;
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moving-speaker tracking and extraction pipeline"};
  app.require_subcommand(1);

  ParamOptions param;
  auto* p = app.add_subcommand("param", "Motion noise std for an expected displacement");
  p->add_option("--disp", param.displacement_deg, "Expected |displacement| in deg")->required();
  p->add_option("--dt", param.delta_t, "Frame period in s");
  p->add_option("--frames", param.frames, "Number of frames t");
  p->add_option("--monte-carlo", param.monte_carlo, "Trajectories for an empirical check");
  p->add_option("--seed", param.seed, "Seed for the Monte-Carlo check");

  SimulateOptions sim;
  Overrides sim_ov;
  std::vector<double> conditions;
  std::optional<std::size_t> scenes;
  bool emit_components = false;
  auto* s = app.add_subcommand("simulate", "Generate a dataset of rendered scenes");
  s->add_option("--corpus", sim.corpus_dir, "Corpus directory with index.json")->required();
  s->add_option("--out", sim.out_dir, "Output directory")->required();
  s->add_option("--condition", conditions, "Expected displacement in deg per 5 s (repeatable)");
  s->add_option("--scenes", scenes, "Scenes per condition");
  s->add_flag("--emit-components", emit_components, "Also write X and V");
  s->add_flag("--resume", sim.resume, "Skip scenes whose files exist");
  s->add_flag("--dry-run", sim.dry_run, "Validate the configuration without rendering");
  add_common(s, sim_ov);

  TrackOptions track;
  Overrides track_ov;
  std::optional<std::string> tracker;
  auto* t = app.add_subcommand("track", "Estimate target DOA tracks");
  t->add_option("--manifest", track.manifest, "Dataset manifest")->required();
  t->add_option("--out", track.out_dir, "Output directory")->required();
  t->add_option("--tracker", tracker, "das-pf | oracle | external:<dir>");
  add_common(t, track_ov);

  ExtractOptions extract;
  Overrides extract_ov;
  std::optional<double> gate;
  auto* x = app.add_subcommand("extract", "Mask-based target extraction");
  x->add_option("--manifest", extract.manifest, "Dataset manifest")->required();
  x->add_option("--tracks", extract.tracks_dir, "Directory of <id>_track.csv files");
  x->add_option("--masks", extract.mask_source, "oracle-gated | external:<dir>");
  x->add_option("--out", extract.out_dir, "Output directory")->required();
  x->add_option("--gate", gate, "Cue gate in deg");
  x->add_flag("--force", extract.force, "Overwrite existing outputs");
  add_common(x, extract_ov);

  EvaluateOptions eval;
  auto* e = app.add_subcommand("evaluate", "Tracking and extraction reports");
  e->add_option("--manifest", eval.manifest, "Dataset manifest")->required();
  e->add_option("--tracks", eval.tracks_dir, "Directory of <id>_track.csv files");
  e->add_option("--extracted", eval.extracted_dir, "Directory of <id>_est.wav files");
  e->add_flag("--unprocessed", eval.unprocessed, "Score the mixture reference channel");
  e->add_flag("--voiced-only", eval.voiced_only, "Restrict tracking metrics to active frames");
  e->add_flag("--plot-data", eval.plot_data, "Write figure CSVs");
  e->add_option("--margin", eval.margin_deg, "Accuracy margin in deg");
  e->add_option("--out", eval.out_dir, "Output directory")->required();

  CorpusOptions corpus;
  auto* c = app.add_subcommand("corpus", "Write a synthetic speech-like corpus");
  c->add_option("--out", corpus.out_dir, "Output directory")->required();
  c->add_option("--speakers", corpus.synth.num_speakers, "Number of speakers");
  c->add_option("--utterances", corpus.synth.utterances_per_speaker, "Utterances per speaker");
  c->add_option("--duration", corpus.synth.duration_s, "Utterance length in s");
  c->add_option("--fs", corpus.synth.fs, "Sample rate in Hz");
  c->add_option("--seed", corpus.synth.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (p->parsed()) return cmd_param(param, out);
    if (s->parsed()) {
      sim.config = resolve(sim_ov);
      if (!conditions.empty()) sim.config.dataset.conditions = conditions;
      if (scenes) sim.config.dataset.scenes_per_condition = *scenes;
      if (emit_components) sim.config.dataset.emit_components = true;
      return cmd_simulate(sim, out, err);
    }
    if (t->parsed()) {
      track.config = resolve(track_ov);
      if (tracker) track.config.tracker = *tracker;
      return cmd_track(track, out, err);
    }
    if (x->parsed()) {
      extract.config = resolve(extract_ov);
      if (gate) extract.config.extraction.gate_deg = *gate;
      return cmd_extract(extract, out, err);
    }
    if (e->parsed()) return cmd_evaluate(eval, out, err);
    if (c->parsed()) return cmd_corpus(corpus, out);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mova
