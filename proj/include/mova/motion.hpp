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

// Constant-velocity azimuth motion model.
//
// The state [theta, theta_dot] evolves as
//   theta'     = theta + dt * theta_dot + dt^2 / 2 * nu
//   theta_dot' = theta_dot + dt * nu,        nu ~ N(0, sigma^2)
// with theta wrapped to [0, 360). Starting from rest, the unwrapped
// displacement after t steps is zero-mean Gaussian with variance
// dt^4 / 12 * (4 t^3 - t) * sigma^2.

#ifndef MOVA_MOTION_HPP_
#define MOVA_MOTION_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mova {

struct MotionParams {
  double sigma = 0.0;      // deg/s^2
  double delta_t = 0.016;  // s
  int num_frames = 312;

  void validate() const;
};

struct CVState {
  double theta = 0.0;      // deg, [0, 360)
  double theta_dot = 0.0;  // deg/s
};

struct Trajectory {
  // thetas[0] is the initial azimuth; thetas.size() == num_frames() + 1.
  std::vector<double> thetas;
  // Unwrapped displacement from thetas[0], accumulated from per-step increments.
  std::vector<double> displacement;
  double delta_t = 0.016;

  int num_frames() const { return static_cast<int>(thetas.size()) - 1; }
};

CVState cv_step(const CVState& state, const MotionParams& params, double noise_sample);

double displacement_variance(const MotionParams& params, int t);
double expected_abs_displacement(const MotionParams& params, int t);
double sigma_from_displacement(double target_disp_deg, double delta_t, int t);

// Frame count corresponding to a duration, i.e. round(duration / delta_t).
int frames_for_duration(double duration_s, double delta_t);

// Deterministic in `seed`; initial.theta_dot is used as given.
Trajectory sample_trajectory(const CVState& initial, const MotionParams& params,
                             std::uint64_t seed);

// CSV with header `frame,theta_deg`, 6 decimals.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
// The displacement track is recovered with shortest-rotation unwrapping.
Trajectory read_trajectory_csv(std::istream& is, double delta_t);
Trajectory read_trajectory_csv(const std::string& path, double delta_t);

}  // namespace mova

#endif  // MOVA_MOTION_HPP_
