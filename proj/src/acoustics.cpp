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

#include "mova/acoustics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "mova/binary_io.hpp"
#include "mova/fft.hpp"

namespace mova {

namespace {

constexpr int kSincHalf = 40;  // 81 taps
constexpr int kSincTaps = 2 * kSincHalf + 1;
constexpr int kFracSteps = 1024;
constexpr double kMinSourceMicDistance = 0.01;
constexpr double kHighPassHz = 50.0;

// Windowed-sinc rows for fractional offsets j / kFracSteps, j = 0..kFracSteps.
const std::vector<double>& fractional_delay_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kFracSteps + 1) * kSincTaps);
    for (int j = 0; j <= kFracSteps; ++j) {
      const double frac = static_cast<double>(j) / kFracSteps;
      for (int k = -kSincHalf; k <= kSincHalf; ++k) {
        const double x = k - frac;
        const double window = 0.5 * (1.0 + std::cos(kPi * x / (kSincHalf + 1)));
        const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
        t[static_cast<std::size_t>(j) * kSincTaps + (k + kSincHalf)] = window * sinc;
      }
    }
    return t;
  }();
  return table;
}

void add_fractional_impulse(std::vector<double>& h, double delay, double amp) {
  const auto& table = fractional_delay_table();
  const double base = std::floor(delay);
  const double frac = delay - base;
  const double pos = frac * kFracSteps;
  const int row = std::min(static_cast<int>(pos), kFracSteps - 1);
  const double mu = pos - row;
  const double* r0 = &table[static_cast<std::size_t>(row) * kSincTaps];
  const double* r1 = r0 + kSincTaps;
  const long n0 = static_cast<long>(base) - kSincHalf;
  const long size = static_cast<long>(h.size());
  for (int i = 0; i < kSincTaps; ++i) {
    const long n = n0 + i;
    if (n < 0 || n >= size) continue;
    h[n] += amp * ((1.0 - mu) * r0[i] + mu * r1[i]);
  }
}

void high_pass_in_place(std::vector<double>& h, double fs) {
  const double w = 2.0 * kPi * kHighPassHz / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : h) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

struct AxisImage {
  double offset;  // image coordinate minus mic coordinate, in m
  int reflections;
};

// Images along one axis with |offset| <= max_dist, sorted by |offset|.
std::vector<AxisImage> axis_images(double src, double mic, double len, double max_dist) {
  std::vector<AxisImage> out;
  const int n = static_cast<int>(std::ceil(max_dist / (2.0 * len))) + 1;
  for (int m = -n; m <= n; ++m) {
    for (int q = 0; q <= 1; ++q) {
      const double offset = (1 - 2 * q) * src + 2.0 * m * len - mic;
      if (std::abs(offset) > max_dist) continue;
      out.push_back({offset, std::abs(m - q) + std::abs(m)});
    }
  }
  std::sort(out.begin(), out.end(), [](const AxisImage& a, const AxisImage& b) {
    const double da = std::abs(a.offset), db = std::abs(b.offset);
    return da != db ? da < db : a.reflections < b.reflections;
  });
  return out;
}

std::vector<double> image_response(const RoomSpec& room, Vec3 mic, Vec3 source, double fs,
                                   std::size_t length, const RirOptions& options, double beta) {
  std::vector<double> h(length, 0.0);
  const double c = room.speed_of_sound;
  const double samples_per_meter = fs / c;
  const double max_dist = (static_cast<double>(length) + kSincHalf) / samples_per_meter;
  const double max_dist2 = max_dist * max_dist;
  const int max_order = options.max_order.value_or(std::numeric_limits<int>::max());
  const double direct = distance(source, mic);
  const double sinc_limit = direct + options.fractional_horizon_s * c;

  if (max_order == 0) {
    add_fractional_impulse(h, direct * samples_per_meter, 1.0 / (4.0 * kPi * direct));
    return h;
  }

  const auto xs = axis_images(source.x, mic.x, room.dims.x, max_dist);
  const auto ys = axis_images(source.y, mic.y, room.dims.y, max_dist);
  const auto zs = axis_images(source.z, mic.z, room.dims.z, max_dist);

  int max_refl = 0;
  for (const auto* axis : {&xs, &ys, &zs})
    for (const auto& a : *axis) max_refl = std::max(max_refl, a.reflections);
  std::vector<double> beta_pow(3 * static_cast<std::size_t>(max_refl) + 1);
  beta_pow[0] = 1.0;
  for (std::size_t i = 1; i < beta_pow.size(); ++i) beta_pow[i] = beta_pow[i - 1] * beta;

  const double amp_scale = 1.0 / (4.0 * kPi);
  const long size = static_cast<long>(length);
  for (const auto& ix : xs) {
    const double rx = max_dist2 - ix.offset * ix.offset;
    if (rx < 0.0) break;
    for (const auto& iy : ys) {
      const double ry = rx - iy.offset * iy.offset;
      if (ry < 0.0) break;
      const int nxy = ix.reflections + iy.reflections;
      if (nxy > max_order) continue;
      const double dxy2 = ix.offset * ix.offset + iy.offset * iy.offset;
      for (const auto& iz : zs) {
        if (iz.offset * iz.offset > ry) break;
        const int order = nxy + iz.reflections;
        if (order > max_order) continue;
        const double d = std::sqrt(dxy2 + iz.offset * iz.offset);
        const double amp = beta_pow[order] * amp_scale / d;
        const double delay = d * samples_per_meter;
        if (d <= sinc_limit) {
          add_fractional_impulse(h, delay, amp);
        } else {
          const long n = std::lround(delay);
          if (n < size) h[n] += amp;
        }
      }
    }
  }
  if (options.high_pass) high_pass_in_place(h, fs);
  return h;
}

std::size_t direct_span_length(double max_dist, double fs, double c) {
  return static_cast<std::size_t>(std::ceil(max_dist * fs / c)) + kSincHalf + 2;
}

}  // namespace

void RoomSpec::validate() const {
  if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0)) throw UsageError("room dimensions must be > 0");
  if (!(t60 > 0.0)) throw UsageError("room T60 must be > 0");
  if (!(speed_of_sound > 0.0)) throw UsageError("speed of sound must be > 0");
}

bool RoomSpec::contains(Vec3 p) const {
  return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 && p.z < dims.z;
}

ArrayGeometry ArrayGeometry::circular(Vec3 center, double radius, int count, double start_deg) {
  if (count < 1) throw UsageError("array needs at least one microphone");
  ArrayGeometry a;
  for (int m = 0; m < count; ++m) {
    const double phi = deg2rad(start_deg + 360.0 * m / count);
    a.mic_positions.push_back({center.x + radius * std::cos(phi), center.y + radius * std::sin(phi),
                               center.z});
  }
  return a;
}

Vec3 ArrayGeometry::center() const {
  Vec3 c;
  for (const auto& p : mic_positions) c = c + p;
  return (1.0 / static_cast<double>(mic_positions.size())) * c;
}

void ArrayGeometry::validate() const {
  if (mic_positions.empty()) throw UsageError("array needs at least one microphone");
  if (reference_index >= mic_positions.size()) throw UsageError("array reference index out of range");
}

double eyring_reflection_coefficient(const RoomSpec& room) {
  room.validate();
  const Vec3 L = room.dims;
  const double volume = L.x * L.y * L.z;
  const double surface = 2.0 * (L.x * L.y + L.x * L.z + L.y * L.z);
  // T60 = 24 ln(10) V / (-c S ln(1 - alpha)), beta = sqrt(1 - alpha).
  const double log_one_minus_alpha =
      -24.0 * std::log(10.0) * volume / (room.speed_of_sound * surface * room.t60);
  return std::exp(0.5 * log_one_minus_alpha);
}

namespace {

double compute_decay_correction(Vec3 L) {
  // Rate of wall hits along direction u is sum |u_i| / L_i; its mean over
  // the sphere is half the sum of 1 / L_i. Normalized decay time tau uses
  // the mean rate, so a single exponential falls 10 log10(e) dB per unit.
  const double mean_rate = 0.5 * (1.0 / L.x + 1.0 / L.y + 1.0 / L.z);
  constexpr int kSteps = 64;
  std::vector<double> rho, weight;
  for (int i = 0; i < kSteps; ++i) {
    const double theta = (i + 0.5) * 0.5 * kPi / kSteps;
    for (int j = 0; j < kSteps; ++j) {
      const double phi = (j + 0.5) * 0.5 * kPi / kSteps;
      const double rate = std::sin(theta) * std::cos(phi) / L.x + std::sin(theta) * std::sin(phi) / L.y +
                          std::cos(theta) / L.z;
      rho.push_back(rate / mean_rate);
      weight.push_back(std::sin(theta));
    }
  }
  // Schroeder integral of the mean decay: EDC(tau) = mean(exp(-rho tau) / rho).
  auto edc = [&](double tau) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) acc += weight[k] * std::exp(-rho[k] * tau) / rho[k];
    return acc;
  };
  const double e0 = edc(0.0);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  constexpr double kStep = 0.01;
  for (int n = 0;; ++n) {
    const double tau = n * kStep;
    const double db = 10.0 * std::log10(edc(tau) / e0);
    if (db < -25.0) break;
    if (db > -5.0) continue;
    sx += tau;
    sy += db;
    sxx += tau * tau;
    sxy += tau * db;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return (-60.0 / slope) / (6.0 * std::log(10.0));
}

}  // namespace

double decay_correction(Vec3 dims) {
  if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0)) throw UsageError("room dimensions must be > 0");
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, double> memo;
  const auto key = std::make_tuple(dims.x, dims.y, dims.z);
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double k = compute_decay_correction(dims);
  std::lock_guard<std::mutex> lock(mutex);
  memo.emplace(key, k);
  return k;
}

double reflection_coefficient(const RoomSpec& room) {
  return std::pow(eyring_reflection_coefficient(room), decay_correction(room.dims));
}

std::size_t auto_rir_length(const RoomSpec& room, double fs) {
  return static_cast<std::size_t>(std::ceil(1.1 * room.t60 * fs));
}

Rir simulate_rir(const RoomSpec& room, const ArrayGeometry& array, Vec3 source, double fs,
                 const RirOptions& options) {
  room.validate();
  array.validate();
  if (!(fs > 0.0)) throw UsageError("sampling rate must be > 0");
  if (options.max_order && *options.max_order < 0) throw UsageError("max_order must be >= 0");
  if (!room.contains(source)) throw UsageError("source lies outside the room");
  double max_direct = 0.0;
  for (const auto& mic : array.mic_positions) {
    if (!room.contains(mic)) throw UsageError("microphone lies outside the room");
    const double d = distance(source, mic);
    if (d < kMinSourceMicDistance) throw UsageError("source coincides with a microphone");
    max_direct = std::max(max_direct, d);
  }
  std::size_t length = 0;
  if (options.length) {
    length = *options.length;
  } else {
    length = direct_span_length(max_direct, fs, room.speed_of_sound);
    if (!(options.max_order && *options.max_order == 0)) length = std::max(length, auto_rir_length(room, fs));
  }
  if (length == 0) throw UsageError("RIR length must be > 0");

  std::uint64_t key = 0;
  if (options.cache) {
    key = rir_cache_key(room, array, source, fs, options, length);
    if (auto hit = options.cache->load(key); hit && hit->length() == length &&
                                             hit->num_mics() == array.num_mics())
      return *std::move(hit);
  }

  const double beta = reflection_coefficient(room);
  Rir rir;
  rir.fs = fs;
  rir.taps.reserve(array.num_mics());
  for (const auto& mic : array.mic_positions)
    rir.taps.push_back(image_response(room, mic, source, fs, length, options, beta));

  if (options.cache) options.cache->store(key, rir);
  return rir;
}

Audio render_static(const Rir& rir, const Audio& dry) {
  if (dry.num_channels() != 1) throw UsageError("render_static: dry signal must be mono");
  if (rir.fs != dry.fs) throw UsageError("render_static: sampling rate mismatch between RIR and signal");
  if (rir.length() == 0 || dry.length() == 0) throw UsageError("render_static: empty input");
  Audio out;
  out.fs = dry.fs;
  for (const auto& taps : rir.taps) out.channels.push_back(fft_convolve(dry.channels[0], taps));
  return out;
}

SourcePath make_circular_path(const Trajectory& traj, Vec3 center, double radius, double height) {
  SourcePath path;
  path.positions.reserve(traj.thetas.size());
  for (double theta : traj.thetas) {
    const double phi = deg2rad(theta);
    path.positions.push_back(
        {center.x + radius * std::cos(phi), center.y + radius * std::sin(phi), height});
  }
  return path;
}

std::size_t hops_for_length(std::size_t num_samples, std::size_t hop) {
  return (num_samples + hop - 1) / hop;
}

namespace {

Audio render_path(const RoomSpec& room, bool check_room, const ArrayGeometry& array,
                  const SourcePath& path, const Audio& dry, std::size_t hop,
                  const RirOptions& options_in) {
  array.validate();
  if (dry.num_channels() != 1) throw UsageError("render: dry signal must be mono");
  if (hop == 0) throw UsageError("render: hop must be > 0");
  const std::size_t n = dry.length();
  if (n == 0) throw UsageError("render: empty signal");
  const std::size_t hops = hops_for_length(n, hop);
  if (path.positions.size() != hops)
    throw UsageError("render: path has " + std::to_string(path.positions.size()) +
                     " points, expected " + std::to_string(hops));
  if (check_room)
    for (const auto& p : path.positions)
      if (!room.contains(p)) throw UsageError("render: path point outside the room");

  RirOptions options = options_in;
  if (!options.length) {
    // One length for the whole path so consecutive responses line up.
    double max_direct = 0.0;
    for (const auto& p : path.positions)
      for (const auto& mic : array.mic_positions) max_direct = std::max(max_direct, distance(p, mic));
    std::size_t length = direct_span_length(max_direct, dry.fs, room.speed_of_sound);
    if (!(options.max_order && *options.max_order == 0)) length = std::max(length, auto_rir_length(room, dry.fs));
    options.length = length;
  }
  const std::size_t rir_len = *options.length;
  const std::size_t seg_len = 2 * hop;
  const std::size_t nfft = next_pow2(seg_len + rir_len - 1);
  RealFft fft(nfft);
  const std::size_t nb = fft.num_bins();
  const std::size_t mics = array.num_mics();
  const double scale = 1.0 / static_cast<double>(nfft);

  Audio out(dry.fs, mics, n + rir_len - 1);
  const auto& x = dry.channels[0];

  std::vector<std::vector<std::complex<double>>> rir_spec(mics, std::vector<std::complex<double>>(nb));
  std::optional<Vec3> cached_pos;
  std::vector<double> buf(nfft);
  std::vector<std::complex<double>> seg_spec(nb), prod(nb);

  for (std::size_t h = 0; h < hops; ++h) {
    const Vec3 pos = path.positions[h];
    if (!cached_pos || !(*cached_pos == pos)) {
      const Rir rir = simulate_rir(room, array, pos, dry.fs, options);
      for (std::size_t m = 0; m < mics; ++m) {
        std::fill(buf.begin(), buf.end(), 0.0);
        std::copy(rir.taps[m].begin(), rir.taps[m].end(), buf.begin());
        fft.forward(buf, rir_spec[m]);
      }
      cached_pos = pos;
    }

    // Segment covers [(h - 1) * hop, (h + 1) * hop).
    const long seg_start = static_cast<long>(h * hop) - static_cast<long>(hop);
    std::fill(buf.begin(), buf.end(), 0.0);
    bool any = false;
    for (std::size_t i = 0; i < seg_len; ++i) {
      const long idx = seg_start + static_cast<long>(i);
      if (idx < 0 || idx >= static_cast<long>(n)) continue;
      double g;
      if (i < hop) {
        // Rising half, shared with hop h - 1.
        const double u = static_cast<double>(i) / static_cast<double>(hop);
        g = h == 0 ? 0.0 : std::pow(std::sin(0.5 * kPi * u), 2);
      } else {
        const double u = static_cast<double>(i - hop) / static_cast<double>(hop);
        g = h + 1 == hops ? 1.0 : std::pow(std::cos(0.5 * kPi * u), 2);
      }
      buf[i] = x[idx] * g;
      any = any || buf[i] != 0.0;
    }
    if (!any) continue;
    fft.forward(buf, seg_spec);
    for (std::size_t m = 0; m < mics; ++m) {
      for (std::size_t k = 0; k < nb; ++k) prod[k] = seg_spec[k] * rir_spec[m][k];
      fft.inverse(prod, buf);
      auto& y = out.channels[m];
      const std::size_t valid = seg_len + rir_len - 1;
      for (std::size_t i = 0; i < valid; ++i) {
        const long idx = seg_start + static_cast<long>(i);
        if (idx < 0) continue;
        if (idx >= static_cast<long>(y.size())) break;
        y[idx] += buf[i] * scale;
      }
    }
  }
  return out;
}

}  // namespace

Audio render_moving(const RoomSpec& room, const ArrayGeometry& array, const SourcePath& path,
                    const Audio& dry, std::size_t hop, const RirOptions& options) {
  room.validate();
  return render_path(room, true, array, path, dry, hop, options);
}

Audio render_direct_path(const ArrayGeometry& array, const SourcePath& path, const Audio& dry,
                         std::size_t hop) {
  // Walls play no role at order zero; an enclosing box satisfies the
  // containment checks of the image model.
  array.validate();
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto extend = [&](Vec3 p) {
    for (double v : {p.x, p.y, p.z}) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  };
  for (const auto& p : path.positions) extend(p);
  for (const auto& p : array.mic_positions) extend(p);
  RoomSpec free_field;
  const double shift = 1.0 - lo;
  free_field.dims = {hi + shift + 1.0, hi + shift + 1.0, hi + shift + 1.0};
  free_field.t60 = 1.0;

  const Vec3 offset{shift, shift, shift};
  ArrayGeometry shifted = array;
  for (auto& p : shifted.mic_positions) p = p + offset;
  SourcePath shifted_path = path;
  for (auto& p : shifted_path.positions) p = p + offset;

  RirOptions options;
  options.max_order = 0;
  Audio all = render_path(free_field, false, shifted, shifted_path, dry, hop, options);
  return Audio::mono(dry.fs, std::move(all.channels[array.reference_index]));
}

RirCache::RirCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw DataError("cannot create RIR cache directory: " + dir_.string());
}

std::optional<RirCache> RirCache::from_env() {
  const char* dir = std::getenv("MOVA_CACHE");
  if (!dir || !*dir) return std::nullopt;
  return RirCache(dir);
}

namespace {

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xF]; }

std::string key_name(std::uint64_t key) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, key >>= 4) s[i] = hex_digit(static_cast<unsigned>(key));
  return s + ".rir";
}

constexpr char kCacheMagic[8] = {'M', 'O', 'V', 'A', 'R', 'I', 'R', '1'};

}  // namespace

std::optional<Rir> RirCache::load(std::uint64_t key) const {
  std::ifstream is(dir_ / key_name(key), std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCacheMagic, 8) != 0) return std::nullopt;
  std::uint32_t mics = 0, len = 0;
  double fs = 0.0;
  is.read(reinterpret_cast<char*>(&mics), 4);
  is.read(reinterpret_cast<char*>(&len), 4);
  is.read(reinterpret_cast<char*>(&fs), 8);
  if (!is) return std::nullopt;
  Rir rir;
  rir.fs = fs;
  rir.taps.assign(mics, std::vector<double>(len));
  for (auto& t : rir.taps) is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(len * 8));
  if (!is) return std::nullopt;
  return rir;
}

void RirCache::store(std::uint64_t key, const Rir& rir) const {
  std::vector<unsigned char> bytes(kCacheMagic, kCacheMagic + 8);
  auto put = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    bytes.insert(bytes.end(), c, c + n);
  };
  const std::uint32_t mics = static_cast<std::uint32_t>(rir.num_mics());
  const std::uint32_t len = static_cast<std::uint32_t>(rir.length());
  put(&mics, 4);
  put(&len, 4);
  put(&rir.fs, 8);
  for (const auto& t : rir.taps) put(t.data(), t.size() * 8);
  write_file_atomically((dir_ / key_name(key)).string(), bytes);
}

std::uint64_t rir_cache_key(const RoomSpec& room, const ArrayGeometry& array, Vec3 source,
                            double fs, const RirOptions& options, std::size_t length) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ c[i]) * 1099511628211ull;
  };
  auto feed_d = [&](double v) { feed(&v, sizeof v); };
  feed("mova-rir-v2", 11);
  for (double v : {room.dims.x, room.dims.y, room.dims.z, room.t60, room.speed_of_sound}) feed_d(v);
  for (const auto& p : array.mic_positions)
    for (double v : {p.x, p.y, p.z}) feed_d(v);
  for (double v : {source.x, source.y, source.z, fs, options.fractional_horizon_s}) feed_d(v);
  const std::int64_t order = options.max_order.value_or(-1);
  const std::uint64_t len = length;
  const unsigned char hp = options.high_pass ? 1 : 0;
  feed(&order, sizeof order);
  feed(&len, sizeof len);
  feed(&hp, 1);
  return h;
}

}  // namespace mova
