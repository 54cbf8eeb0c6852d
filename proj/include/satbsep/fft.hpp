// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SATBSEP_FFT_HPP_
#define SATBSEP_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace satbsep {

// Real-input FFT of a fixed size, backed by FFTW (FFTW_ESTIMATE plans, so
// results are reproducible on a given platform). Instances are not
// thread-safe; create one per thread if needed. Plan creation itself is
// serialized internally.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // in: n samples; out: n/2+1 bins.
  void forward(const double* in, std::complex<double>* out);
  // in: n/2+1 bins; out: n samples, scaled by 1/n (true inverse).
  void inverse(const std::complex<double>* in, double* out);

 private:
  std::size_t n_;
  void* plan_fwd_;
  void* plan_bwd_;
  double* real_buf_;
  void* cplx_buf_;
};

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace satbsep

#endif  // SATBSEP_FFT_HPP_
