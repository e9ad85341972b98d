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

// Shoe-box image-source room impulse responses and hop-synchronous
// rendering of moving sources.
//
// Walls share one amplitude reflection coefficient derived from T60 with
// Eyring's formula. Images arriving within `fractional_horizon_s` of the
// direct path are placed with an 81-tap Hann-windowed sinc; later images
// are rounded to the nearest sample. Responses that contain reflections
// are high-passed at 50 Hz to remove the image method's DC build-up.

#ifndef MOVA_ACOUSTICS_HPP_
#define MOVA_ACOUSTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mova/common.hpp"
#include "mova/motion.hpp"

namespace mova {

struct RoomSpec {
  Vec3 dims{6.0, 5.0, 3.0};  // m
  double t60 = 0.3;          // s
  double speed_of_sound = 343.0;

  void validate() const;
  bool contains(Vec3 p) const;
};

struct ArrayGeometry {
  std::vector<Vec3> mic_positions;
  std::size_t reference_index = 0;

  // `count` omnidirectional mics uniformly on a horizontal circle; mic 0 at
  // azimuth `start_deg`.
  static ArrayGeometry circular(Vec3 center, double radius, int count, double start_deg = 0.0);
  // Three mics on a 5 cm radius circle.
  static ArrayGeometry default_preset(Vec3 center) { return circular(center, 0.05, 3); }

  std::size_t num_mics() const { return mic_positions.size(); }
  Vec3 center() const;
  void validate() const;
};

struct Rir {
  std::vector<std::vector<double>> taps;  // [mic][sample]
  double fs = 16000.0;

  std::size_t num_mics() const { return taps.size(); }
  std::size_t length() const { return taps.empty() ? 0 : taps.front().size(); }
};

class RirCache;

struct RirOptions {
  // Maximum total reflection order; unset includes every image that
  // arrives within the response length.
  std::optional<int> max_order;
  // Response length in samples; unset uses the direct-path span, extended
  // to ceil(1.1 * T60 * fs) unless max_order == 0.
  std::optional<std::size_t> length;
  double fractional_horizon_s = 0.1;
  bool high_pass = true;
  const RirCache* cache = nullptr;
};

// Amplitude reflection coefficient from Eyring's formula.
double eyring_reflection_coefficient(const RoomSpec& room);
// Specular images in a box decay as a mixture of exponentials, one rate per
// direction of travel, so Eyring's coefficient overshoots the requested
// T60. Returns k >= 1 such that beta = eyring^k gives a -5..-25 dB
// Schroeder fit equal to T60 for the direction-averaged image decay.
double decay_correction(Vec3 dims);
// Coefficient shared by all six walls: eyring^decay_correction(dims).
double reflection_coefficient(const RoomSpec& room);
std::size_t auto_rir_length(const RoomSpec& room, double fs);

Rir simulate_rir(const RoomSpec& room, const ArrayGeometry& array, Vec3 source, double fs,
                 const RirOptions& options = {});

// Per-channel linear convolution; output length dry.length() + rir.length() - 1.
Audio render_static(const Rir& rir, const Audio& dry);

struct SourcePath {
  std::vector<Vec3> positions;  // one per hop
};

// Positions at constant radius and height around `center`, azimuth taken
// from the trajectory (0 deg along +x, counter-clockwise).
SourcePath make_circular_path(const Trajectory& traj, Vec3 center, double radius, double height);

std::size_t hops_for_length(std::size_t num_samples, std::size_t hop);

// Sample n in [h * hop, (h + 1) * hop) is shared between the responses at
// path[h] and path[h + 1] with cos^2 / sin^2 weights, so the per-hop
// weights sum to one and a constant path reproduces render_static.
// Output length dry.length() + rir_length - 1.
Audio render_moving(const RoomSpec& room, const ArrayGeometry& array, const SourcePath& path,
                    const Audio& dry, std::size_t hop, const RirOptions& options = {});

// Direct path only, reference microphone only.
Audio render_direct_path(const ArrayGeometry& array, const SourcePath& path, const Audio& dry,
                         std::size_t hop);

// On-disk store of simulated responses, keyed by a hash of every input.
class RirCache {
 public:
  explicit RirCache(std::filesystem::path dir);
  // Uses $MOVA_CACHE when set.
  static std::optional<RirCache> from_env();

  std::optional<Rir> load(std::uint64_t key) const;
  void store(std::uint64_t key, const Rir& rir) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

std::uint64_t rir_cache_key(const RoomSpec& room, const ArrayGeometry& array, Vec3 source,
                            double fs, const RirOptions& options, std::size_t length);

}  // namespace mova

#endif  // MOVA_ACOUSTICS_HPP_
