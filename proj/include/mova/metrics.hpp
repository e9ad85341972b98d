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

#ifndef MOVA_METRICS_HPP_
#define MOVA_METRICS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mova/motion.hpp"
#include "mova/tracking_types.hpp"

namespace mova {

inline constexpr double kSiSdrCapDb = 60.0;

// Scale-invariant SDR in dB, clamped to [-60, 60]. A zero estimate yields -60.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

// Wrap-aware absolute difference in [0, 180].
double angular_error(double est_deg, double truth_deg);

// Ground truth azimuth of STFT frame t is traj.thetas[t + 1].
std::vector<double> frame_truth(const Trajectory& truth);

// Fraction of frames with angular error <= margin (inclusive).
double frame_accuracy(const DoaEstimateTrack& track, const Trajectory& truth, double margin_deg = 5.0);

// Quantile with averaging at discontinuities (type 2); invariant to
// duplicating every sample.
double quantile(std::vector<double> values, double p);

struct TrackingReport {
  std::vector<double> errors;  // per frame, deg
  double margin = 5.0;
  double accuracy = 0.0;
  double median_error = 0.0;
  double q25_error = 0.0;
  double q75_error = 0.0;
};

// `voiced`, when given, restricts the statistics to frames flagged true.
TrackingReport make_tracking_report(const DoaEstimateTrack& track, const Trajectory& truth,
                                    double margin_deg = 5.0,
                                    const std::vector<bool>* voiced = nullptr);

// Frames whose energy in `signal` is within `range_db` of the loudest frame.
std::vector<bool> active_frames(std::span<const double> signal, const StftConfig& config,
                                double range_db = 30.0);

struct ExtractionReport {
  double si_sdr = 0.0;
  double si_sdr_improvement = 0.0;
};

ExtractionReport make_extraction_report(std::span<const double> estimate,
                                        std::span<const double> mixture_ref,
                                        std::span<const double> reference);

struct SceneReport {
  std::string scene_id;
  double condition = 0.0;  // expected displacement, deg per 5 s
  std::optional<TrackingReport> tracking;
  std::optional<ExtractionReport> extraction;
};

struct ConditionSummary {
  double condition = 0.0;
  std::size_t num_scenes = 0;
  std::size_t num_tracked = 0;
  std::size_t num_extracted = 0;
  double accuracy = 0.0;  // pooled over frames
  double median_error = 0.0;
  double q25_error = 0.0;
  double q75_error = 0.0;
  double mean_si_sdr = 0.0;
  double mean_si_sdr_improvement = 0.0;
};

// One summary per distinct condition, ascending. Throws on an empty input.
std::vector<ConditionSummary> aggregate(std::span<const SceneReport> reports);

std::string summaries_to_csv(std::span<const ConditionSummary> summaries);
std::string summaries_to_json(std::span<const ConditionSummary> summaries);
std::string scene_reports_to_csv(std::span<const SceneReport> reports);

}  // namespace mova

#endif  // MOVA_METRICS_HPP_
