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

#include "mova/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "mova/fft.hpp"

namespace mova {

void StftConfig::validate() const {
  if (window_len < 4 || window_len % 2 != 0) throw UsageError("STFT window length must be even");
  if (hop * 2 != window_len) throw UsageError("STFT hop must be half the window length");
  if (!(fs > 0.0)) throw UsageError("STFT sampling rate must be > 0");
}

std::vector<double> sqrt_hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

std::size_t stft_num_frames(std::size_t length, const StftConfig& config) {
  if (length <= config.window_len) return 1;
  return 1 + (length - config.window_len + config.hop - 1) / config.hop;
}

Spectrogram::Spectrogram(std::size_t channels, std::size_t frames, std::size_t bins,
                         StftConfig config)
    : channels_(channels),
      frames_(frames),
      bins_(bins),
      config_(config),
      data_(channels * frames * bins) {}

Spectrogram Spectrogram::channel(std::size_t c) const {
  if (c >= channels_) throw UsageError("spectrogram channel out of range");
  Spectrogram out(1, frames_, bins_, config_);
  std::copy_n(frame(c, 0), frames_ * bins_, out.data_.begin());
  return out;
}

Spectrogram stft(const Audio& signal, const StftConfig& config) {
  config.validate();
  if (signal.num_channels() == 0 || signal.length() == 0) throw UsageError("stft: empty signal");
  if (signal.fs != config.fs) throw UsageError("stft: sampling rate does not match config");
  const std::size_t n = config.window_len;
  const std::size_t len = signal.length();
  const std::size_t frames = stft_num_frames(len, config);
  const auto window = sqrt_hann_window(n);
  RealFft fft(n);

  Spectrogram spec(signal.num_channels(), frames, config.num_bins(), config);
  std::vector<double> buf(n);
  for (std::size_t c = 0; c < signal.num_channels(); ++c) {
    const auto& x = signal.channels[c];
    if (x.size() != len) throw UsageError("stft: channels differ in length");
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t start = t * config.hop;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = start + i;
        buf[i] = idx < len ? x[idx] * window[i] : 0.0;
      }
      fft.forward(buf, std::span<std::complex<double>>(spec.frame(c, t), spec.num_bins()));
    }
  }
  return spec;
}

Audio istft(const Spectrogram& spec, const StftConfig& config, std::optional<std::size_t> length) {
  config.validate();
  if (spec.config() != config || spec.num_bins() != config.num_bins())
    throw UsageError("istft: spectrogram was produced with a different STFT config");
  const std::size_t n = config.window_len;
  const std::size_t full = (spec.num_frames() - 1) * config.hop + n;
  const std::size_t out_len = length.value_or(full);
  const auto window = sqrt_hann_window(n);
  RealFft fft(n);
  const double scale = 1.0 / static_cast<double>(n);

  Audio out(config.fs, spec.num_channels(), out_len);
  std::vector<double> buf(n);
  for (std::size_t c = 0; c < spec.num_channels(); ++c) {
    auto& y = out.channels[c];
    for (std::size_t t = 0; t < spec.num_frames(); ++t) {
      const std::size_t start = t * config.hop;
      if (start >= out_len) break;
      fft.inverse(std::span<const std::complex<double>>(spec.frame(c, t), spec.num_bins()), buf);
      const std::size_t valid = std::min(n, out_len - start);
      for (std::size_t i = 0; i < valid; ++i) y[start + i] += buf[i] * scale * window[i];
    }
  }
  return out;
}

void DoaGrid::validate() const {
  if (num_regions < 1) throw UsageError("DOA grid needs at least one region");
  if (std::abs(num_regions * resolution - 360.0) > 1e-9)
    throw UsageError("DOA grid must cover 360 degrees");
}

double DoaGrid::center(int index) const { return index * resolution + 0.5 * resolution; }

int doa_region(double theta_deg, const DoaGrid& grid) {
  const double w = wrap_degrees(theta_deg);
  int idx = static_cast<int>(std::floor(w / grid.resolution));
  idx %= grid.num_regions;
  if (idx < 0) idx += grid.num_regions;
  return idx;
}

OneHotDoa encode_doa(double theta_deg, const DoaGrid& grid) {
  grid.validate();
  if (!std::isfinite(theta_deg)) throw UsageError("encode_doa: non-finite azimuth");
  OneHotDoa out;
  out.index = doa_region(theta_deg, grid);
  out.vector.assign(grid.num_regions, 0.0);
  out.vector[out.index] = 1.0;
  return out;
}

double decode_doa(int index, const DoaGrid& grid) {
  if (index < 0 || index >= grid.num_regions) throw UsageError("decode_doa: index out of range");
  return grid.center(index);
}

}  // namespace mova
