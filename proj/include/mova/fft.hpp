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

#ifndef MOVA_FFT_HPP_
#define MOVA_FFT_HPP_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mova {

// Unnormalized real FFT of fixed size n (n/2 + 1 output bins).
// Plans are shared process-wide; planning is serialized internally and
// execution is reentrant, so one RealFft may be used from many threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }
  std::size_t num_bins() const { return n_ / 2 + 1; }

  // in.size() == n, out.size() == n/2 + 1.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  // Inverse without 1/n scaling. in.size() == n/2 + 1, out.size() == n.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::unique_ptr<Plans> plans_;
};

std::size_t next_pow2(std::size_t n);

// Linear convolution via blocked overlap-add; output length a.size() + b.size() - 1.
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);
// Direct-form linear convolution.
std::vector<double> direct_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace mova

#endif  // MOVA_FFT_HPP_
