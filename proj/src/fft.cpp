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

#include "mova/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "mova/common.hpp"

namespace mova {

namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2) throw UsageError("FFT size must be >= 2");
  std::vector<double> re(n);
  std::vector<std::complex<double>> cx(n / 2 + 1);
  // ESTIMATE keeps plan selection, and thus rounding, reproducible.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                     reinterpret_cast<fftw_complex*>(cx.data()), flags);
  plans_->c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     reinterpret_cast<fftw_complex*>(cx.data()), re.data(),
                                     flags);
}

RealFft::~RealFft() {
  if (!plans_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != num_bins()) throw UsageError("RealFft::forward: bad sizes");
  // r2c does not modify its input.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  if (in.size() != num_bins() || out.size() != n_) throw UsageError("RealFft::inverse: bad sizes");
  // c2r destroys its input.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> direct_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() < b.size()) std::swap(a, b);
  // a is the long signal, b the filter.
  if (b.size() <= 32) return direct_convolve(a, b);
  const std::size_t nfft = next_pow2(std::max<std::size_t>(2 * b.size(), 1024));
  const std::size_t block = nfft - b.size() + 1;
  RealFft fft(nfft);
  const std::size_t nb = fft.num_bins();

  std::vector<double> buf(nfft, 0.0);
  std::copy(b.begin(), b.end(), buf.begin());
  std::vector<std::complex<double>> filt(nb);
  fft.forward(buf, filt);

  std::vector<std::complex<double>> spec(nb);
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (std::size_t start = 0; start < a.size(); start += block) {
    const std::size_t len = std::min(block, a.size() - start);
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy_n(a.begin() + start, len, buf.begin());
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < nb; ++k) spec[k] *= filt[k];
    fft.inverse(spec, buf);
    const std::size_t valid = std::min(nfft, out.size() - start);
    for (std::size_t i = 0; i < valid; ++i) out[start + i] += buf[i] * scale;
  }
  return out;
}

}  // namespace mova
