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

// Speech-like test signals: a harmonic glottal source with a jittered
// pitch contour through three formant resonators, organized in syllables
// with fricative onsets and short pauses. Each synthetic speaker has its
// own pitch range and vocal tract scale.

#ifndef MOVA_SYNTH_CORPUS_HPP_
#define MOVA_SYNTH_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace mova {

struct SynthVoice {
  double f0 = 120.0;            // Hz
  double formant_scale = 1.0;
};

SynthVoice synth_voice(std::uint64_t seed);

std::vector<double> synthesize_utterance(const SynthVoice& voice, double duration_s, double fs,
                                         std::uint64_t seed);

struct SynthCorpusOptions {
  int num_speakers = 8;
  int utterances_per_speaker = 4;
  double duration_s = 6.0;
  double fs = 16000.0;
  std::uint64_t seed = 1;
};

// Writes <dir>/<speaker>/<utterance>.wav and <dir>/index.json.
void write_synth_corpus(const std::string& dir, const SynthCorpusOptions& options);

}  // namespace mova

#endif  // MOVA_SYNTH_CORPUS_HPP_
