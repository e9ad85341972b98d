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

#include "mova/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mova/common.hpp"

namespace mova {

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) throw UsageError("si_sdr: length mismatch");
  double ref_energy = 0.0, dot = 0.0, est_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    dot += estimate[i] * reference[i];
    est_energy += estimate[i] * estimate[i];
  }
  if (ref_energy == 0.0) throw UsageError("si_sdr: zero reference");
  if (est_energy == 0.0) return -kSiSdrCapDb;
  const double alpha = dot / ref_energy;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = s - estimate[i];
    target += s * s;
    noise += e * e;
  }
  if (noise == 0.0) return kSiSdrCapDb;
  if (target == 0.0) return -kSiSdrCapDb;
  return std::clamp(10.0 * std::log10(target / noise), -kSiSdrCapDb, kSiSdrCapDb);
}

double angular_error(double est_deg, double truth_deg) {
  const double d = std::fmod(std::abs(est_deg - truth_deg), 360.0);
  return std::min(d, 360.0 - d);
}

std::vector<double> frame_truth(const Trajectory& truth) {
  if (truth.thetas.size() < 2) return {};
  return {truth.thetas.begin() + 1, truth.thetas.end()};
}

namespace {

void check_lengths(const DoaEstimateTrack& track, const Trajectory& truth) {
  if (truth.thetas.empty() || track.size() != static_cast<std::size_t>(truth.num_frames()))
    throw UsageError("track has " + std::to_string(track.size()) + " frames, trajectory has " +
                     std::to_string(truth.num_frames()));
}

}  // namespace

double frame_accuracy(const DoaEstimateTrack& track, const Trajectory& truth, double margin_deg) {
  check_lengths(track, truth);
  if (track.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < track.size(); ++t)
    if (angular_error(track.thetas[t], truth.thetas[t + 1]) <= margin_deg) ++hits;
  return static_cast<double>(hits) / static_cast<double>(track.size());
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double np = n * p;
  const double j = std::floor(np);
  const auto at = [&](double idx) {
    const auto i = static_cast<std::size_t>(std::clamp(idx, 0.0, n - 1.0));
    return values[i];
  };
  // 1-based order statistics x_j, x_{j+1}.
  if (np == j && j > 0) return 0.5 * (at(j - 1) + at(j));
  return at(j);
}

TrackingReport make_tracking_report(const DoaEstimateTrack& track, const Trajectory& truth,
                                    double margin_deg, const std::vector<bool>* voiced) {
  check_lengths(track, truth);
  if (voiced && voiced->size() != track.size()) throw UsageError("voiced mask length mismatch");
  TrackingReport r;
  r.margin = margin_deg;
  for (std::size_t t = 0; t < track.size(); ++t) {
    if (voiced && !(*voiced)[t]) continue;
    r.errors.push_back(angular_error(track.thetas[t], truth.thetas[t + 1]));
  }
  if (r.errors.empty()) return r;
  const auto hits = std::count_if(r.errors.begin(), r.errors.end(),
                                  [&](double e) { return e <= margin_deg; });
  r.accuracy = static_cast<double>(hits) / static_cast<double>(r.errors.size());
  r.median_error = quantile(r.errors, 0.5);
  r.q25_error = quantile(r.errors, 0.25);
  r.q75_error = quantile(r.errors, 0.75);
  return r;
}

std::vector<bool> active_frames(std::span<const double> signal, const StftConfig& config,
                                double range_db) {
  config.validate();
  const std::size_t frames = stft_num_frames(signal.size(), config);
  std::vector<double> energy(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * config.hop;
    const std::size_t end = std::min(signal.size(), start + config.window_len);
    for (std::size_t n = start; n < end; ++n) energy[t] += signal[n] * signal[n];
  }
  const double peak = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  const double threshold = peak * std::pow(10.0, -range_db / 10.0);
  std::vector<bool> active(frames);
  for (std::size_t t = 0; t < frames; ++t) active[t] = peak > 0.0 && energy[t] >= threshold;
  return active;
}

ExtractionReport make_extraction_report(std::span<const double> estimate,
                                        std::span<const double> mixture_ref,
                                        std::span<const double> reference) {
  ExtractionReport r;
  r.si_sdr = si_sdr(estimate, reference);
  r.si_sdr_improvement = r.si_sdr - si_sdr(mixture_ref, reference);
  return r;
}

std::vector<ConditionSummary> aggregate(std::span<const SceneReport> reports) {
  if (reports.empty()) throw UsageError("aggregate: no reports");
  std::map<double, std::vector<const SceneReport*>> groups;
  for (const auto& r : reports) groups[r.condition].push_back(&r);

  std::vector<ConditionSummary> out;
  for (const auto& [condition, group] : groups) {
    ConditionSummary s;
    s.condition = condition;
    s.num_scenes = group.size();
    std::vector<double> errors;
    std::size_t hits = 0;
    double sdr_sum = 0.0, sdri_sum = 0.0;
    std::vector<double> sdrs, sdris;
    for (const auto* r : group) {
      if (r->tracking) {
        ++s.num_tracked;
        for (double e : r->tracking->errors) {
          errors.push_back(e);
          if (e <= r->tracking->margin) ++hits;
        }
      }
      if (r->extraction) {
        ++s.num_extracted;
        sdrs.push_back(r->extraction->si_sdr);
        sdris.push_back(r->extraction->si_sdr_improvement);
      }
    }
    // Sum in sorted order so the means do not depend on report order.
    std::sort(sdrs.begin(), sdrs.end());
    std::sort(sdris.begin(), sdris.end());
    for (double v : sdrs) sdr_sum += v;
    for (double v : sdris) sdri_sum += v;
    if (!errors.empty()) {
      s.accuracy = static_cast<double>(hits) / static_cast<double>(errors.size());
      s.median_error = quantile(errors, 0.5);
      s.q25_error = quantile(errors, 0.25);
      s.q75_error = quantile(errors, 0.75);
    }
    if (s.num_extracted > 0) {
      s.mean_si_sdr = sdr_sum / static_cast<double>(s.num_extracted);
      s.mean_si_sdr_improvement = sdri_sum / static_cast<double>(s.num_extracted);
    }
    if (s.num_tracked == 0 && s.num_extracted == 0)
      throw UsageError("aggregate: condition group without any report content");
    out.push_back(s);
  }
  return out;
}

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string summaries_to_csv(std::span<const ConditionSummary> summaries) {
  std::ostringstream os;
  os << "condition_deg_per_5s,num_scenes,num_tracked,num_extracted,accuracy,median_ae_deg,"
        "q25_ae_deg,q75_ae_deg,mean_si_sdr_db,mean_si_sdr_improvement_db\n";
  for (const auto& s : summaries)
    os << fmt(s.condition, 3) << ',' << s.num_scenes << ',' << s.num_tracked << ','
       << s.num_extracted << ',' << fmt(s.accuracy) << ',' << fmt(s.median_error) << ','
       << fmt(s.q25_error) << ',' << fmt(s.q75_error) << ',' << fmt(s.mean_si_sdr) << ','
       << fmt(s.mean_si_sdr_improvement) << '\n';
  return os.str();
}

std::string summaries_to_json(std::span<const ConditionSummary> summaries) {
  std::ostringstream os;
  os << "{\n  \"conditions\": [";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    os << (i ? ",\n" : "\n") << "    {\"accuracy\": " << fmt(s.accuracy)
       << ", \"condition_deg_per_5s\": " << fmt(s.condition, 3)
       << ", \"mean_si_sdr_db\": " << fmt(s.mean_si_sdr)
       << ", \"mean_si_sdr_improvement_db\": " << fmt(s.mean_si_sdr_improvement)
       << ", \"median_ae_deg\": " << fmt(s.median_error) << ", \"num_extracted\": " << s.num_extracted
       << ", \"num_scenes\": " << s.num_scenes << ", \"num_tracked\": " << s.num_tracked
       << ", \"q25_ae_deg\": " << fmt(s.q25_error) << ", \"q75_ae_deg\": " << fmt(s.q75_error) << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

std::string scene_reports_to_csv(std::span<const SceneReport> reports) {
  std::ostringstream os;
  os << "scene_id,condition_deg_per_5s,accuracy,median_ae_deg,q25_ae_deg,q75_ae_deg,si_sdr_db,"
        "si_sdr_improvement_db\n";
  for (const auto& r : reports) {
    os << r.scene_id << ',' << fmt(r.condition, 3) << ',';
    if (r.tracking)
      os << fmt(r.tracking->accuracy) << ',' << fmt(r.tracking->median_error) << ','
         << fmt(r.tracking->q25_error) << ',' << fmt(r.tracking->q75_error) << ',';
    else
      os << ",,,,";
    if (r.extraction)
      os << fmt(r.extraction->si_sdr) << ',' << fmt(r.extraction->si_sdr_improvement);
    else
      os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace mova
