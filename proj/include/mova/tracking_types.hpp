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

#ifndef MOVA_TRACKING_TYPES_HPP_
#define MOVA_TRACKING_TYPES_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mova/dsp.hpp"

namespace mova {

struct DoaEstimateTrack {
  std::vector<double> thetas;      // deg, [0, 360)
  std::vector<double> confidence;  // max posterior per frame

  std::size_t size() const { return thetas.size(); }
};

// Per-frame probability vectors over the azimuth grid.
class PosteriorGrid {
 public:
  PosteriorGrid() = default;
  PosteriorGrid(std::size_t frames, DoaGrid grid, double theta0);

  std::size_t num_frames() const { return frames_; }
  std::size_t num_regions() const { return static_cast<std::size_t>(grid_.num_regions); }
  const DoaGrid& grid() const { return grid_; }
  double theta0() const { return theta0_; }
  void set_theta0(double theta0) { theta0_ = theta0; }

  double* row(std::size_t t) { return &values_[t * num_regions()]; }
  const double* row(std::size_t t) const { return &values_[t * num_regions()]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Throws DataError if a row is negative or its sum is off by more than tol.
  void check_normalized(double tol = 1e-6) const;

 private:
  std::size_t frames_ = 0;
  DoaGrid grid_;
  double theta0_ = 0.0;
  std::vector<double> values_;
};

// CSV with header `frame,theta_deg,confidence`.
void write_track_csv(std::ostream& os, const DoaEstimateTrack& track);
void write_track_csv(const std::string& path, const DoaEstimateTrack& track);
DoaEstimateTrack read_track_csv(std::istream& is);
DoaEstimateTrack read_track_csv(const std::string& path);

}  // namespace mova

#endif  // MOVA_TRACKING_TYPES_HPP_
