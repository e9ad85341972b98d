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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mova/acoustics.hpp"
#include "mova/cli.hpp"
#include "mova/dsp.hpp"
#include "mova/extraction.hpp"
#include "mova/metrics.hpp"
#include "mova/motion.hpp"
#include "mova/tracking.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw mova::UsageError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array from_vector(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Accepts [samples] or [channels, samples].
mova::Audio to_audio(const Array& a, double fs) {
  mova::Audio audio;
  audio.fs = fs;
  if (a.ndim() == 1) {
    audio.channels.push_back(to_vector(a));
  } else if (a.ndim() == 2) {
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    for (std::size_t c = 0; c < rows; ++c) audio.channels.emplace_back(a.data() + c * cols, a.data() + (c + 1) * cols);
  } else {
    throw mova::UsageError("expected a 1-D or 2-D signal array");
  }
  return audio;
}

Array from_audio(const mova::Audio& audio) {
  Array out({audio.num_channels(), audio.length()});
  for (std::size_t c = 0; c < audio.num_channels(); ++c)
    std::copy(audio.channels[c].begin(), audio.channels[c].end(), out.mutable_data() + c * audio.length());
  return out;
}

mova::ArrayGeometry to_geometry(const Array& mics) {
  if (mics.ndim() != 2 || mics.shape(1) != 3) throw mova::UsageError("microphone positions must be [M, 3]");
  mova::ArrayGeometry g;
  for (py::ssize_t m = 0; m < mics.shape(0); ++m)
    g.mic_positions.push_back({mics.at(m, 0), mics.at(m, 1), mics.at(m, 2)});
  g.validate();
  return g;
}

mova::StftConfig stft_config(double fs, std::size_t window_len, std::size_t hop) {
  mova::StftConfig cfg{window_len, hop, fs};
  cfg.validate();
  return cfg;
}

ComplexArray from_spectrogram(const mova::Spectrogram& s) {
  ComplexArray out({s.num_channels(), s.num_frames(), s.num_bins()});
  std::copy(s.data().begin(), s.data().end(), out.mutable_data());
  return out;
}

mova::Spectrogram to_spectrogram(const ComplexArray& a, const mova::StftConfig& cfg) {
  if (a.ndim() != 3) throw mova::UsageError("expected a [channels, frames, bins] array");
  mova::Spectrogram s(a.shape(0), a.shape(1), a.shape(2), cfg);
  std::copy(a.data(), a.data() + a.size(), s.data().begin());
  return s;
}

py::dict pf_result_dict(const mova::PfResult& r) {
  Array posterior({r.posterior.num_frames(), r.posterior.num_regions()});
  std::copy(r.posterior.values().begin(), r.posterior.values().end(), posterior.mutable_data());
  py::dict d;
  d["thetas"] = from_vector(r.track.thetas);
  d["confidence"] = from_vector(r.track.confidence);
  d["posterior"] = posterior;
  d["degenerate_frames"] = r.diagnostics.degenerate_frames;
  d["num_resamples"] = r.diagnostics.num_resamples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mova, m) {
  m.doc() = "Moving-speaker tracking and extraction toolkit";
  py::register_exception<mova::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<mova::DataError>(m, "DataError", PyExc_RuntimeError);

  m.def("sigma_from_displacement", &mova::sigma_from_displacement, py::arg("displacement_deg"),
        py::arg("delta_t") = 0.016, py::arg("frames") = 312);
  m.def(
      "expected_abs_displacement",
      [](double sigma, double delta_t, int t) {
        return mova::expected_abs_displacement({sigma, delta_t, t}, t);
      },
      py::arg("sigma"), py::arg("delta_t") = 0.016, py::arg("frames") = 312);
  m.def(
      "sample_trajectory",
      [](double theta0, double sigma, double delta_t, int num_frames, std::uint64_t seed) {
        const auto tr = mova::sample_trajectory({theta0, 0.0}, {sigma, delta_t, num_frames}, seed);
        return py::make_tuple(from_vector(tr.thetas), from_vector(tr.displacement));
      },
      py::arg("theta0"), py::arg("sigma"), py::arg("delta_t") = 0.016, py::arg("num_frames") = 312,
      py::arg("seed") = 0, "Returns (wrapped azimuths, unwrapped displacement), num_frames + 1 entries each.");

  m.def(
      "stft",
      [](const Array& x, double fs, std::size_t window_len, std::size_t hop) {
        return from_spectrogram(mova::stft(to_audio(x, fs), stft_config(fs, window_len, hop)));
      },
      py::arg("signal"), py::arg("fs") = 16000.0, py::arg("window_len") = 512, py::arg("hop") = 256);
  m.def(
      "istft",
      [](const ComplexArray& spec, std::optional<std::size_t> length, double fs, std::size_t window_len,
         std::size_t hop) {
        const auto cfg = stft_config(fs, window_len, hop);
        return from_audio(mova::istft(to_spectrogram(spec, cfg), cfg, length));
      },
      py::arg("spec"), py::arg("length") = py::none(), py::arg("fs") = 16000.0, py::arg("window_len") = 512,
      py::arg("hop") = 256);

  m.def(
      "simulate_rir",
      [](const std::array<double, 3>& dims, double t60, const Array& mics, const std::array<double, 3>& source,
         double fs, std::optional<int> max_order) {
        mova::RoomSpec room{{dims[0], dims[1], dims[2]}, t60};
        mova::RirOptions opt;
        opt.max_order = max_order;
        const auto rir = mova::simulate_rir(room, to_geometry(mics), {source[0], source[1], source[2]}, fs, opt);
        mova::Audio taps;
        taps.fs = rir.fs;
        taps.channels = rir.taps;
        return from_audio(taps);
      },
      py::arg("room_dims"), py::arg("t60"), py::arg("mics"), py::arg("source"), py::arg("fs") = 16000.0,
      py::arg("max_order") = py::none());

  m.def(
      "si_sdr", [](const Array& est, const Array& ref) { return mova::si_sdr(to_vector(est), to_vector(ref)); },
      py::arg("estimate"), py::arg("reference"));
  m.def("angular_error", &mova::angular_error, py::arg("estimate_deg"), py::arg("truth_deg"));
  m.def(
      "encode_doa",
      [](double theta, int num_regions) {
        const auto h = mova::encode_doa(theta, {num_regions, 360.0 / num_regions});
        return py::make_tuple(h.index, from_vector(h.vector));
      },
      py::arg("theta_deg"), py::arg("num_regions") = 180);
  m.def(
      "decode_doa", [](int index, int num_regions) { return mova::decode_doa(index, {num_regions, 360.0 / num_regions}); },
      py::arg("index"), py::arg("num_regions") = 180);

  m.def(
      "das_power_map",
      [](const Array& x, const Array& mics, double fs, int num_regions) {
        const mova::DoaGrid grid{num_regions, 360.0 / num_regions};
        const auto cfg = stft_config(fs, 512, 256);
        const auto map = mova::das_power_map(mova::stft(to_audio(x, fs), cfg), to_geometry(mics), grid);
        Array out({map.frames, static_cast<std::size_t>(num_regions)});
        std::copy(map.values.begin(), map.values.end(), out.mutable_data());
        return out;
      },
      py::arg("signal"), py::arg("mics"), py::arg("fs") = 16000.0, py::arg("num_regions") = 180);
  m.def(
      "pf_track",
      [](const Array& x, const Array& mics, double theta0, double sigma, double fs, std::uint64_t seed,
         int num_particles) {
        const auto cfg = stft_config(fs, 512, 256);
        const auto spec = mova::stft(to_audio(x, fs), cfg);
        mova::MotionParams motion{sigma, cfg.frame_period(), static_cast<int>(spec.num_frames())};
        mova::PfConfig pf;
        pf.seed = seed;
        pf.num_particles = num_particles;
        return pf_result_dict(mova::pf_track(spec, theta0, motion, pf, to_geometry(mics), mova::DoaGrid{}));
      },
      py::arg("signal"), py::arg("mics"), py::arg("theta0"), py::arg("sigma"), py::arg("fs") = 16000.0,
      py::arg("seed") = 0, py::arg("num_particles") = 500);

  m.def(
      "oracle_mask_extract",
      [](const Array& dry, const Array& mixture_ref, double fs, double mask_max) {
        const auto cfg = stft_config(fs, 512, 256);
        const auto s = to_audio(dry, fs);
        const auto y = to_audio(mixture_ref, fs);
        const auto mask = mova::oracle_complex_mask(s, y, 0, cfg, mask_max);
        return from_vector(mova::apply_mask(mova::stft(y, cfg), mask, cfg, y.length()).channels[0]);
      },
      py::arg("dry_target"), py::arg("mixture_ref"), py::arg("fs") = 16000.0, py::arg("mask_max") = 2.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"mova"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = mova::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a `mova` subcommand in-process; returns (exit code, stdout, stderr).");
}
