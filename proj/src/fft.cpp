// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "satbsep/common.hpp"

namespace satbsep {

namespace {
// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t size) : n_(size) {
  if (n_ < 2) throw ValueError("FFT size must be >= 2");
  real_buf_ = fftw_alloc_real(n_);
  cplx_buf_ = fftw_alloc_complex(n_ / 2 + 1);
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_buf_,
                                   static_cast<fftw_complex*>(cplx_buf_),
                                   FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_),
                                   static_cast<fftw_complex*>(cplx_buf_),
                                   real_buf_, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw Error("FFTW plan creation failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(real_buf_, in, n_ * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, cplx_buf_, bins() * sizeof(std::complex<double>));
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(cplx_buf_, in, bins() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real_buf_[i] * scale;
}

}  // namespace satbsep
