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

#include "mova/tracking_types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mova {

PosteriorGrid::PosteriorGrid(std::size_t frames, DoaGrid grid, double theta0)
    : frames_(frames),
      grid_(grid),
      theta0_(theta0),
      values_(frames * static_cast<std::size_t>(grid.num_regions), 0.0) {
  grid_.validate();
}

void PosteriorGrid::check_normalized(double tol) const {
  for (std::size_t t = 0; t < frames_; ++t) {
    const double* r = row(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < num_regions(); ++i) {
      if (!(r[i] >= 0.0) || !std::isfinite(r[i]))
        throw DataError("posterior row " + std::to_string(t) + " has a negative or non-finite entry");
      sum += r[i];
    }
    if (std::abs(sum - 1.0) > tol)
      throw DataError("posterior row " + std::to_string(t) + " sums to " + std::to_string(sum));
  }
}

void write_track_csv(std::ostream& os, const DoaEstimateTrack& track) {
  if (track.confidence.size() != track.thetas.size())
    throw UsageError("track: confidence length mismatch");
  os << "frame,theta_deg,confidence\n";
  char buf[96];
  for (std::size_t t = 0; t < track.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", t, csv_azimuth(track.thetas[t]), track.confidence[t]);
    os << buf;
  }
}

void write_track_csv(const std::string& path, const DoaEstimateTrack& track) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  write_track_csv(os, track);
}

DoaEstimateTrack read_track_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "frame,theta_deg,confidence")
    throw DataError("track CSV: expected header 'frame,theta_deg,confidence'");
  DoaEstimateTrack track;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t frame = 0;
    char c1 = 0, c2 = 0;
    double theta = 0.0, conf = 0.0;
    if (!(row >> frame >> c1 >> theta >> c2 >> conf) || c1 != ',' || c2 != ',')
      throw DataError("track CSV: malformed row '" + line + "'");
    if (frame != expected++) throw DataError("track CSV: non-consecutive frame index");
    track.thetas.push_back(theta);
    track.confidence.push_back(conf);
  }
  return track;
}

DoaEstimateTrack read_track_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open track: " + path);
  return read_track_csv(is);
}

}  // namespace mova
