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

#ifndef MOVA_WAV_HPP_
#define MOVA_WAV_HPP_

#include <cstddef>
#include <string>

#include "mova/common.hpp"

namespace mova {

struct WavInfo {
  double fs = 0.0;
  std::size_t num_channels = 0;
  std::size_t num_samples = 0;  // per channel
  int bits_per_sample = 0;
  bool is_float = false;
};

// Reads PCM 16/24/32-bit integer or 32/64-bit IEEE float WAV files.
Audio read_wav(const std::string& path);
WavInfo read_wav_info(const std::string& path);
// Always writes 32-bit IEEE float PCM.
void write_wav(const std::string& path, const Audio& audio);

}  // namespace mova

#endif  // MOVA_WAV_HPP_
