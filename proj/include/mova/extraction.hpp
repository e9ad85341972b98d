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

// Mask-based extraction on the reference channel: S_hat = istft(M * Y0).

#ifndef MOVA_EXTRACTION_HPP_
#define MOVA_EXTRACTION_HPP_

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mova/dsp.hpp"
#include "mova/scene.hpp"
#include "mova/tracking_types.hpp"

namespace mova {

inline constexpr double kDefaultMaskMax = 2.0;

struct Mask {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> values;  // [frames x bins]

  Mask() = default;
  Mask(std::size_t frames, std::size_t bins, std::complex<double> fill = 0.0)
      : frames(frames), bins(bins), values(frames * bins, fill) {}

  std::complex<double>& at(std::size_t t, std::size_t k) { return values[t * bins + k]; }
  const std::complex<double>& at(std::size_t t, std::size_t k) const { return values[t * bins + k]; }

  // Rescales entries whose magnitude exceeds mask_max; rejects non-finite entries.
  void clip(double mask_max = kDefaultMaskMax);
};

// `spec_ref` must hold a single channel.
Audio apply_mask(const Spectrogram& spec_ref, const Mask& mask, const StftConfig& config,
                 std::optional<std::size_t> length = std::nullopt);

// S / Y0 per bin, clipped to mask_max, zero where |Y0| < 1e-8 * max |Y0|.
Mask oracle_complex_mask(const Audio& dry_target, const Audio& mixture, std::size_t reference_index,
                         const StftConfig& config, double mask_max = kDefaultMaskMax);
Mask oracle_complex_mask(const SceneAudio& scene, std::size_t reference_index,
                         const StftConfig& config, double mask_max = kDefaultMaskMax);

struct ExtractionOptions {
  double gate_deg = 20.0;
  double mask_max = kDefaultMaskMax;
};

struct ExtractionResult {
  Audio estimate;
  Mask mask;
  std::string scene_id;
  std::string cue_source;
};

// With an external mask the mask is applied as given. Otherwise the oracle
// mask is zeroed on frames where the cue is more than gate_deg away from the
// target ground truth.
ExtractionResult cue_conditioned_extract(const SceneAudio& scene, std::size_t reference_index,
                                         const DoaEstimateTrack& cue, const StftConfig& config,
                                         const ExtractionOptions& options = {},
                                         const Mask* external_mask = nullptr);

inline constexpr char kMaskMagic[8] = {'M', 'O', 'V', 'A', 'M', 'K', '1', '\0'};

// Binary container: "MOVAMK1\0", u32 frames, u32 bins, interleaved float32 re/im.
void write_mask(const std::string& path, const Mask& mask);
Mask read_mask(const std::string& path);

}  // namespace mova

#endif  // MOVA_EXTRACTION_HPP_
