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

// Target speaker tracking from an initial azimuth.
//
// The DAS particle filter propagates particles with the constant-velocity
// motion model and weights them with a pseudo-likelihood built from the
// steered output power of a far-field delay-and-sum beamformer:
//   L(theta_i) = softmax_i(beta * P[t, i] / max_j P[t, j]).
// The posterior grid row of a frame is the weighted particle histogram,
// smoothed with a [1/4, 1/2, 1/4] circular kernel.

#ifndef MOVA_TRACKING_HPP_
#define MOVA_TRACKING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mova/acoustics.hpp"
#include "mova/dsp.hpp"
#include "mova/motion.hpp"
#include "mova/tracking_types.hpp"

namespace mova {

struct SteeredPowerMap {
  std::size_t frames = 0;
  DoaGrid grid;
  std::vector<double> values;  // [frames x regions]

  const double* row(std::size_t t) const { return &values[t * static_cast<std::size_t>(grid.num_regions)]; }
};

struct FrequencyBand {
  double lo_hz = 125.0;
  double hi_hz = 4000.0;
};

SteeredPowerMap das_power_map(const Spectrogram& spec, const ArrayGeometry& array,
                              const DoaGrid& grid, const FrequencyBand& band = {},
                              double speed_of_sound = 343.0);

struct PfConfig {
  int num_particles = 500;
  double beta = 5.0;
  double init_spread_deg = 2.0;
  // Initial velocity std is sigma * delta_t * velocity_init_scale.
  double velocity_init_scale = 10.0;
  double likelihood_floor = 1e-6;
  double resample_ess_fraction = 0.5;
  FrequencyBand band;
  double speed_of_sound = 343.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PfDiagnostics {
  std::vector<std::size_t> degenerate_frames;  // prediction-only updates
  std::size_t num_resamples = 0;
};

struct PfResult {
  PosteriorGrid posterior;
  DoaEstimateTrack track;
  PfDiagnostics diagnostics;
};

// Frame estimates are weighted circular means of the particle azimuths.
PfResult pf_track(const Spectrogram& spec, double theta0, const MotionParams& motion,
                  const PfConfig& config, const ArrayGeometry& array, const DoaGrid& grid);
PfResult pf_track(const SteeredPowerMap& power, double theta0, const MotionParams& motion,
                  const PfConfig& config);

// Region center of each row's argmax; exact ties go to the region closest
// to the previous estimate (theta0 for the first frame).
DoaEstimateTrack map_decode(const PosteriorGrid& posterior);

// Ground truth quantized to region centers, one entry per STFT frame.
DoaEstimateTrack oracle_track(const Trajectory& trajectory, const DoaGrid& grid);
// One-hot rows at the ground-truth regions.
PosteriorGrid oracle_posterior(const Trajectory& trajectory, const DoaGrid& grid);

// Binary container: "MOVAPG1\0", u32 frames, u32 regions, float32 rows.
void write_posterior_grid(const std::string& path, const PosteriorGrid& posterior);
// Rows off by more than 1e-4 are rejected; rows off by more than 1e-6 are
// renormalized with a warning on stderr.
PosteriorGrid read_posterior_grid(const std::string& path, double theta0 = 0.0);

}  // namespace mova

#endif  // MOVA_TRACKING_HPP_
