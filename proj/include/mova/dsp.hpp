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

// STFT analysis/synthesis and the azimuth grid shared by tracking and
// extraction.

#ifndef MOVA_DSP_HPP_
#define MOVA_DSP_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "mova/common.hpp"

namespace mova {

// Square-root periodic Hann analysis and synthesis windows at 50% overlap;
// the squared windows sum to one, so synthesis needs no normalization.
struct StftConfig {
  std::size_t window_len = 512;
  std::size_t hop = 256;
  double fs = 16000.0;

  std::size_t num_bins() const { return window_len / 2 + 1; }
  double frame_period() const { return static_cast<double>(hop) / fs; }
  void validate() const;
  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

std::vector<double> sqrt_hann_window(std::size_t n);

// Number of frames for a signal of `length` samples: frame t covers
// [t * hop, t * hop + window_len), the tail is zero-padded.
std::size_t stft_num_frames(std::size_t length, const StftConfig& config);

class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t channels, std::size_t frames, std::size_t bins, StftConfig config);

  std::size_t num_channels() const { return channels_; }
  std::size_t num_frames() const { return frames_; }
  std::size_t num_bins() const { return bins_; }
  const StftConfig& config() const { return config_; }

  std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) {
    return data_[(c * frames_ + t) * bins_ + k];
  }
  const std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) const {
    return data_[(c * frames_ + t) * bins_ + k];
  }
  std::complex<double>* frame(std::size_t c, std::size_t t) { return &data_[(c * frames_ + t) * bins_]; }
  const std::complex<double>* frame(std::size_t c, std::size_t t) const {
    return &data_[(c * frames_ + t) * bins_];
  }
  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

  Spectrogram channel(std::size_t c) const;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  StftConfig config_;
  std::vector<std::complex<double>> data_;
};

Spectrogram stft(const Audio& signal, const StftConfig& config);

// Output length is `length` if given, else (frames - 1) * hop + window_len.
Audio istft(const Spectrogram& spec, const StftConfig& config,
            std::optional<std::size_t> length = std::nullopt);

struct DoaGrid {
  int num_regions = 180;
  double resolution = 2.0;  // deg

  void validate() const;
  double center(int index) const;
  friend bool operator==(const DoaGrid&, const DoaGrid&) = default;
};

struct OneHotDoa {
  int index = 0;
  std::vector<double> vector;
};

int doa_region(double theta_deg, const DoaGrid& grid);
OneHotDoa encode_doa(double theta_deg, const DoaGrid& grid);
// Region center in degrees.
double decode_doa(int index, const DoaGrid& grid);

}  // namespace mova

#endif  // MOVA_DSP_HPP_
