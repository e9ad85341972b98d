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

#include "mova/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "mova/binary_io.hpp"
#include "mova/metrics.hpp"

namespace mova {

void Mask::clip(double mask_max) {
  for (auto& m : values) {
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) throw DataError("mask has a non-finite entry");
    const double a = std::abs(m);
    if (a > mask_max) m *= mask_max / a;
  }
}

Audio apply_mask(const Spectrogram& spec_ref, const Mask& mask, const StftConfig& config,
                 std::optional<std::size_t> length) {
  if (spec_ref.num_channels() != 1) throw UsageError("apply_mask: expected a single-channel spectrogram");
  if (mask.frames != spec_ref.num_frames() || mask.bins != spec_ref.num_bins())
    throw UsageError("mask shape " + std::to_string(mask.frames) + "x" + std::to_string(mask.bins) +
                     " does not match spectrogram " + std::to_string(spec_ref.num_frames()) + "x" +
                     std::to_string(spec_ref.num_bins()));
  Spectrogram masked = spec_ref;
  for (std::size_t i = 0; i < mask.values.size(); ++i) masked.data()[i] *= mask.values[i];
  return istft(masked, config, length);
}

Mask oracle_complex_mask(const Audio& dry_target, const Audio& mixture, std::size_t reference_index,
                         const StftConfig& config, double mask_max) {
  if (reference_index >= mixture.num_channels()) throw UsageError("reference channel out of range");
  const Audio y0 = Audio::mono(mixture.fs, mixture.channels[reference_index]);
  const Spectrogram ys = stft(y0, config);
  const Spectrogram ss = stft(dry_target, config);
  if (ss.num_frames() != ys.num_frames()) throw UsageError("dry target and mixture lengths differ");
  double peak = 0.0;
  for (const auto& v : ys.data()) peak = std::max(peak, std::abs(v));
  const double eps = 1e-8 * peak;
  Mask mask(ys.num_frames(), ys.num_bins());
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    const auto y = ys.data()[i];
    mask.values[i] = std::abs(y) < eps ? std::complex<double>(0.0) : ss.data()[i] / y;
  }
  mask.clip(mask_max);
  return mask;
}

Mask oracle_complex_mask(const SceneAudio& scene, std::size_t reference_index, const StftConfig& config,
                         double mask_max) {
  return oracle_complex_mask(scene.dry_target, scene.mixture, reference_index, config, mask_max);
}

ExtractionResult cue_conditioned_extract(const SceneAudio& scene, std::size_t reference_index,
                                         const DoaEstimateTrack& cue, const StftConfig& config,
                                         const ExtractionOptions& options, const Mask* external_mask) {
  if (reference_index >= scene.mixture.num_channels()) throw UsageError("reference channel out of range");
  const Spectrogram y0 = stft(Audio::mono(scene.mixture.fs, scene.mixture.channels[reference_index]), config);
  if (cue.size() != y0.num_frames())
    throw DataError("frame-count mismatch: cue track has " + std::to_string(cue.size()) +
                    " frames, spectrogram has " + std::to_string(y0.num_frames()));
  ExtractionResult result;
  if (external_mask != nullptr) {
    result.mask = *external_mask;
    result.cue_source = "external";
  } else {
    result.mask = oracle_complex_mask(scene, reference_index, config, options.mask_max);
    const auto truth = frame_truth(scene.target_trajectory);
    if (truth.size() != cue.size())
      throw DataError("frame-count mismatch: cue track has " + std::to_string(cue.size()) +
                      " frames, ground truth has " + std::to_string(truth.size()));
    for (std::size_t t = 0; t < cue.size(); ++t) {
      if (angular_error(cue.thetas[t], truth[t]) > options.gate_deg)
        std::fill_n(&result.mask.at(t, 0), result.mask.bins, std::complex<double>(0.0));
    }
    result.cue_source = "oracle-gated";
  }
  result.estimate = apply_mask(y0, result.mask, config, scene.mixture.length());
  return result;
}

void write_mask(const std::string& path, const Mask& mask) {
  if (mask.values.size() != mask.frames * mask.bins) throw UsageError("mask: inconsistent shape");
  auto bytes = container_header(kMaskMagic, static_cast<std::uint32_t>(mask.frames),
                                static_cast<std::uint32_t>(mask.bins));
  bytes.reserve(bytes.size() + mask.values.size() * 8);
  for (const auto& m : mask.values) {
    append_f32_le(bytes, static_cast<float>(m.real()));
    append_f32_le(bytes, static_cast<float>(m.imag()));
  }
  write_file_atomically(path, bytes);
}

Mask read_mask(const std::string& path) {
  const Container c = read_container(path, kMaskMagic, 8);
  Mask mask(c.rows, c.cols);
  const unsigned char* p = c.payload.data();
  for (auto& m : mask.values) {
    m = {decode_f32_le(p), decode_f32_le(p + 4)};
    p += 8;
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw DataError("mask file has a non-finite entry: " + path);
  }
  return mask;
}

}  // namespace mova
