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

#ifndef MOVA_COMMON_HPP_
#define MOVA_COMMON_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mova {

// Invalid arguments and violated preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent data (files, corpora, manifests).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

// Multichannel sampled signal; a mono signal has one channel.
struct Audio {
  double fs = 16000.0;
  std::vector<std::vector<double>> channels;

  Audio() = default;
  Audio(double sample_rate, std::size_t num_channels, std::size_t length)
      : fs(sample_rate), channels(num_channels, std::vector<double>(length, 0.0)) {}
  static Audio mono(double sample_rate, std::vector<double> samples) {
    Audio a;
    a.fs = sample_rate;
    a.channels.push_back(std::move(samples));
    return a;
  }

  std::size_t num_channels() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
};

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle in degrees into [0, 360).
inline double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

// Azimuth rounded to 6 decimals for text output, so that values just below
// 360 are written as 0 rather than 360.000000.
inline double csv_azimuth(double deg) {
  const double r = std::round(wrap_degrees(deg) * 1e6) / 1e6;
  return r >= 360.0 ? 0.0 : r;
}

// Signed shortest rotation from `from` to `to`, in (-180, 180].
inline double signed_angle_diff(double to, double from) {
  double d = wrap_degrees(to - from);
  return d > 180.0 ? d - 360.0 : d;
}

// 64-bit mixing function used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace mova

#endif  // MOVA_COMMON_HPP_
