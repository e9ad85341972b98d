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

#include "mova/motion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "mova/common.hpp"

namespace mova {

namespace {

double growth(int t) {
  const double td = static_cast<double>(t);
  return 4.0 * td * td * td - td;
}

void require_frame(int t) {
  if (t < 1) throw UsageError("frame index must be >= 1, got " + std::to_string(t));
}

}  // namespace

void MotionParams::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw UsageError("motion sigma must be >= 0");
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw UsageError("motion delta_t must be > 0");
  if (num_frames < 1) throw UsageError("motion num_frames must be >= 1");
}

CVState cv_step(const CVState& state, const MotionParams& params, double noise_sample) {
  const double dt = params.delta_t;
  CVState next;
  next.theta = wrap_degrees(state.theta + dt * state.theta_dot + 0.5 * dt * dt * noise_sample);
  next.theta_dot = state.theta_dot + dt * noise_sample;
  return next;
}

double displacement_variance(const MotionParams& params, int t) {
  require_frame(t);
  const double dt2 = params.delta_t * params.delta_t;
  return dt2 * dt2 / 12.0 * growth(t) * params.sigma * params.sigma;
}

double expected_abs_displacement(const MotionParams& params, int t) {
  require_frame(t);
  return params.delta_t * params.delta_t / std::sqrt(6.0 * kPi) * std::sqrt(growth(t)) *
         params.sigma;
}

double sigma_from_displacement(double target_disp_deg, double delta_t, int t) {
  require_frame(t);
  if (!(target_disp_deg >= 0.0)) throw UsageError("target displacement must be >= 0");
  if (!(delta_t > 0.0)) throw UsageError("delta_t must be > 0");
  return target_disp_deg * std::sqrt(6.0 * kPi) / (delta_t * delta_t * std::sqrt(growth(t)));
}

int frames_for_duration(double duration_s, double delta_t) {
  if (!(delta_t > 0.0)) throw UsageError("delta_t must be > 0");
  return static_cast<int>(std::lround(duration_s / delta_t));
}

Trajectory sample_trajectory(const CVState& initial, const MotionParams& params,
                             std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Trajectory traj;
  traj.delta_t = params.delta_t;
  traj.thetas.reserve(params.num_frames + 1);
  traj.displacement.reserve(params.num_frames + 1);

  CVState state{wrap_degrees(initial.theta), initial.theta_dot};
  double disp = 0.0;
  traj.thetas.push_back(state.theta);
  traj.displacement.push_back(0.0);
  const double dt = params.delta_t;
  for (int t = 0; t < params.num_frames; ++t) {
    const double nu = params.sigma > 0.0 ? params.sigma * noise(rng) : 0.0;
    disp += dt * state.theta_dot + 0.5 * dt * dt * nu;
    state = cv_step(state, params, nu);
    traj.thetas.push_back(state.theta);
    traj.displacement.push_back(disp);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "frame,theta_deg\n";
  char buf[64];
  for (std::size_t i = 0; i < traj.thetas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, csv_azimuth(traj.thetas[i]));
    os << buf;
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  write_trajectory_csv(os, traj);
  if (!os) throw DataError("write failed: " + path);
}

Trajectory read_trajectory_csv(std::istream& is, double delta_t) {
  std::string line;
  if (!std::getline(is, line) || line != "frame,theta_deg")
    throw DataError("trajectory CSV: expected header 'frame,theta_deg'");
  Trajectory traj;
  traj.delta_t = delta_t;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t frame = 0;
    char comma = 0;
    double theta = 0.0;
    if (!(row >> frame >> comma >> theta) || comma != ',')
      throw DataError("trajectory CSV: malformed row '" + line + "'");
    if (frame != expected) throw DataError("trajectory CSV: non-consecutive frame index");
    if (!(theta >= 0.0 && theta < 360.0)) throw DataError("trajectory CSV: azimuth out of range");
    ++expected;
    traj.thetas.push_back(theta);
  }
  if (traj.thetas.empty()) throw DataError("trajectory CSV: no rows");
  traj.displacement.assign(traj.thetas.size(), 0.0);
  for (std::size_t i = 1; i < traj.thetas.size(); ++i)
    traj.displacement[i] =
        traj.displacement[i - 1] + signed_angle_diff(traj.thetas[i], traj.thetas[i - 1]);
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path, double delta_t) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open trajectory: " + path);
  return read_trajectory_csv(is, delta_t);
}

}  // namespace mova
