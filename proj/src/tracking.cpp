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

#include "mova/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <random>

#include "mova/binary_io.hpp"
#include "mova/metrics.hpp"

namespace mova {

namespace {

constexpr char kPosteriorMagic[8] = "MOVAPG1";

}  // namespace

SteeredPowerMap das_power_map(const Spectrogram& spec, const ArrayGeometry& array,
                              const DoaGrid& grid, const FrequencyBand& band,
                              double speed_of_sound) {
  grid.validate();
  array.validate();
  const std::size_t mics = spec.num_channels();
  if (mics < 2) throw UsageError("das_power_map: need at least two channels");
  if (mics != array.num_mics()) throw UsageError("das_power_map: channel count does not match array");
  const StftConfig& cfg = spec.config();
  const double nyquist = 0.5 * cfg.fs;
  if (!(band.lo_hz >= 0.0) || !(band.hi_hz <= nyquist) || !(band.lo_hz <= band.hi_hz))
    throw UsageError("das_power_map: band must lie within [0, fs/2]");
  const double bin_hz = cfg.fs / static_cast<double>(cfg.window_len);
  const auto k_lo = static_cast<std::size_t>(std::ceil(band.lo_hz / bin_hz));
  const auto k_hi = std::min(static_cast<std::size_t>(std::floor(band.hi_hz / bin_hz)), spec.num_bins() - 1);
  if (k_lo > k_hi) throw UsageError("das_power_map: empty frequency band");
  const std::size_t nk = k_hi - k_lo + 1;
  const auto regions = static_cast<std::size_t>(grid.num_regions);

  // conj(steering) / M, laid out [region][bin][mic].
  const Vec3 c = array.center();
  std::vector<std::complex<double>> weights(regions * nk * mics);
  for (std::size_t i = 0; i < regions; ++i) {
    const double az = deg2rad(grid.center(static_cast<int>(i)));
    const Vec3 u{std::cos(az), std::sin(az), 0.0};
    for (std::size_t m = 0; m < mics; ++m) {
      const Vec3 p = array.mic_positions[m] - c;
      // Arrival delay relative to the array center.
      const double delay = -(p.x * u.x + p.y * u.y + p.z * u.z) / speed_of_sound;
      for (std::size_t j = 0; j < nk; ++j) {
        const double omega = 2.0 * kPi * static_cast<double>(k_lo + j) * bin_hz;
        weights[(i * nk + j) * mics + m] = std::polar(1.0 / static_cast<double>(mics), omega * delay);
      }
    }
  }

  SteeredPowerMap map;
  map.frames = spec.num_frames();
  map.grid = grid;
  map.values.assign(map.frames * regions, 0.0);
  std::vector<std::complex<double>> y(nk * mics);
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t m = 0; m < mics; ++m)
      for (std::size_t j = 0; j < nk; ++j) y[j * mics + m] = spec.at(m, t, k_lo + j);
    for (std::size_t i = 0; i < regions; ++i) {
      const std::complex<double>* w = &weights[i * nk * mics];
      double power = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < mics; ++m) acc += w[j * mics + m] * y[j * mics + m];
        power += std::norm(acc);
      }
      map.values[t * regions + i] = power;
    }
  }
  return map;
}

void PfConfig::validate() const {
  if (num_particles < 1) throw UsageError("pf: num_particles must be >= 1");
  if (!(beta >= 0.0)) throw UsageError("pf: beta must be >= 0");
  if (!(init_spread_deg >= 0.0)) throw UsageError("pf: init_spread_deg must be >= 0");
  if (!(likelihood_floor > 0.0)) throw UsageError("pf: likelihood_floor must be > 0");
  if (!(resample_ess_fraction >= 0.0 && resample_ess_fraction <= 1.0))
    throw UsageError("pf: resample_ess_fraction must lie in [0, 1]");
}

namespace {

struct ParticleSet {
  std::vector<CVState> states;
  std::vector<double> weights;
};

void systematic_resample(ParticleSet& ps, std::mt19937_64& rng) {
  const std::size_t n = ps.states.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0 / static_cast<double>(n));
  const double u0 = unif(rng);
  std::vector<CVState> next(n);
  double cum = ps.weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u0 + static_cast<double>(i) / static_cast<double>(n);
    while (u > cum && j + 1 < n) cum += ps.weights[++j];
    next[i] = ps.states[j];
  }
  ps.states = std::move(next);
  std::fill(ps.weights.begin(), ps.weights.end(), 1.0 / static_cast<double>(n));
}

void normalize_row(double* row, std::size_t n, double floor) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = std::max(row[i], floor);
    sum += row[i];
  }
  for (std::size_t i = 0; i < n; ++i) row[i] /= sum;
}

}  // namespace

PfResult pf_track(const Spectrogram& spec, double theta0, const MotionParams& motion,
                  const PfConfig& config, const ArrayGeometry& array, const DoaGrid& grid) {
  const SteeredPowerMap power = das_power_map(spec, array, grid, config.band, config.speed_of_sound);
  return pf_track(power, theta0, motion, config);
}

PfResult pf_track(const SteeredPowerMap& power, double theta0, const MotionParams& motion,
                  const PfConfig& config) {
  config.validate();
  if (!std::isfinite(theta0)) throw UsageError("pf: theta0 must be finite");
  if (!(motion.sigma >= 0.0) || !(motion.delta_t > 0.0)) throw UsageError("pf: invalid motion params");
  const DoaGrid& grid = power.grid;
  const auto regions = static_cast<std::size_t>(grid.num_regions);
  const auto n = static_cast<std::size_t>(config.num_particles);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ParticleSet ps;
  ps.states.resize(n);
  ps.weights.assign(n, 1.0 / static_cast<double>(n));
  const double vel_std = motion.sigma * motion.delta_t * config.velocity_init_scale;
  for (auto& s : ps.states) {
    s.theta = wrap_degrees(theta0 + config.init_spread_deg * gauss(rng));
    s.theta_dot = vel_std * gauss(rng);
  }

  PfResult result;
  result.posterior = PosteriorGrid(power.frames, grid, wrap_degrees(theta0));
  result.track.thetas.reserve(power.frames);
  result.track.confidence.reserve(power.frames);

  std::vector<double> lik(regions);
  std::vector<double> hist(regions);
  for (std::size_t t = 0; t < power.frames; ++t) {
    for (auto& s : ps.states) s = cv_step(s, motion, motion.sigma * gauss(rng));

    const double* p = power.row(t);
    double pmax = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < regions; ++i) {
      pmax = std::max(pmax, p[i]);
      finite = finite && std::isfinite(p[i]);
    }
    if (pmax > 0.0 && finite) {
      double z = 0.0;
      for (std::size_t i = 0; i < regions; ++i) {
        lik[i] = std::exp(config.beta * (p[i] / pmax - 1.0));
        z += lik[i];
      }
      for (auto& l : lik) l = std::max(l / z, config.likelihood_floor);
      double wsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        ps.weights[j] *= lik[static_cast<std::size_t>(doa_region(ps.states[j].theta, grid))];
        wsum += ps.weights[j];
      }
      if (wsum > 0.0 && std::isfinite(wsum)) {
        for (auto& w : ps.weights) w /= wsum;
      } else {
        std::fill(ps.weights.begin(), ps.weights.end(), 1.0 / static_cast<double>(n));
      }
    } else {
      result.diagnostics.degenerate_frames.push_back(t);
    }

    double sx = 0.0, sy = 0.0;
    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = deg2rad(ps.states[j].theta);
      sx += ps.weights[j] * std::cos(a);
      sy += ps.weights[j] * std::sin(a);
      hist[static_cast<std::size_t>(doa_region(ps.states[j].theta, grid))] += ps.weights[j];
    }
    const double estimate =
        (sx == 0.0 && sy == 0.0) ? result.posterior.theta0() : wrap_degrees(rad2deg(std::atan2(sy, sx)));

    double* row = result.posterior.row(t);
    for (std::size_t i = 0; i < regions; ++i) {
      const double left = hist[(i + regions - 1) % regions];
      const double right = hist[(i + 1) % regions];
      row[i] = regions >= 3 ? 0.25 * left + 0.5 * hist[i] + 0.25 * right : hist[i];
    }
    normalize_row(row, regions, config.likelihood_floor);
    result.track.thetas.push_back(estimate);
    result.track.confidence.push_back(*std::max_element(row, row + regions));

    double sq = 0.0;
    for (double w : ps.weights) sq += w * w;
    const double ess = 1.0 / sq;
    if (ess < config.resample_ess_fraction * static_cast<double>(n)) {
      systematic_resample(ps, rng);
      ++result.diagnostics.num_resamples;
    }
  }
  return result;
}

DoaEstimateTrack map_decode(const PosteriorGrid& posterior) {
  const DoaGrid& grid = posterior.grid();
  const std::size_t regions = posterior.num_regions();
  DoaEstimateTrack track;
  double previous = posterior.theta0();
  for (std::size_t t = 0; t < posterior.num_frames(); ++t) {
    const double* row = posterior.row(t);
    const double best = *std::max_element(row, row + regions);
    int pick = -1;
    double pick_dist = 0.0;
    for (std::size_t i = 0; i < regions; ++i) {
      if (row[i] != best) continue;
      const double d = angular_error(grid.center(static_cast<int>(i)), previous);
      if (pick < 0 || d < pick_dist) {
        pick = static_cast<int>(i);
        pick_dist = d;
      }
    }
    previous = grid.center(pick);
    track.thetas.push_back(previous);
    track.confidence.push_back(best);
  }
  return track;
}

DoaEstimateTrack oracle_track(const Trajectory& trajectory, const DoaGrid& grid) {
  grid.validate();
  DoaEstimateTrack track;
  for (double theta : frame_truth(trajectory)) {
    track.thetas.push_back(grid.center(doa_region(theta, grid)));
    track.confidence.push_back(1.0);
  }
  return track;
}

PosteriorGrid oracle_posterior(const Trajectory& trajectory, const DoaGrid& grid) {
  const auto truth = frame_truth(trajectory);
  PosteriorGrid post(truth.size(), grid, trajectory.thetas.empty() ? 0.0 : trajectory.thetas[0]);
  for (std::size_t t = 0; t < truth.size(); ++t) post.row(t)[doa_region(truth[t], grid)] = 1.0;
  return post;
}

void write_posterior_grid(const std::string& path, const PosteriorGrid& posterior) {
  auto bytes = container_header(kPosteriorMagic, static_cast<std::uint32_t>(posterior.num_frames()),
                                static_cast<std::uint32_t>(posterior.num_regions()));
  bytes.reserve(bytes.size() + posterior.values().size() * 4);
  for (double v : posterior.values()) append_f32_le(bytes, static_cast<float>(v));
  write_file_atomically(path, bytes);
}

PosteriorGrid read_posterior_grid(const std::string& path, double theta0) {
  const Container c = read_container(path, kPosteriorMagic, 4);
  DoaGrid grid{static_cast<int>(c.cols), 360.0 / static_cast<double>(c.cols)};
  PosteriorGrid post(c.rows, grid, theta0);
  auto& v = post.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = decode_f32_le(&c.payload[i * 4]);
  bool warned = false;
  for (std::size_t t = 0; t < post.num_frames(); ++t) {
    double* row = post.row(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < post.num_regions(); ++i) {
      if (!(row[i] >= 0.0) || !std::isfinite(row[i]))
        throw DataError("posterior grid " + path + ": negative or non-finite entry in row " +
                        std::to_string(t));
      sum += row[i];
    }
    const double err = std::abs(sum - 1.0);
    if (err > 1e-4)
      throw DataError("posterior grid " + path + ": row " + std::to_string(t) +
                      " is not normalized (sum " + std::to_string(sum) + ")");
    if (err > 1e-6) {
      if (!warned)
        std::cerr << "warning: renormalizing posterior rows in " << path << " (row " << t
                  << " sums to " << sum << ")\n";
      warned = true;
      for (std::size_t i = 0; i < post.num_regions(); ++i) row[i] /= sum;
    }
  }
  return post;
}

}  // namespace mova
