// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Data-parallel numeric kernels. Every kernel comes in a serial and an
// OpenMP variant selected by the `par` flag; both variants compute each
// output element with the same inner-loop order, so their results are
// bit-identical and independent of the thread count. That keeps trained
// checkpoints reproducible and lets tests compare the two paths exactly.

#ifndef SATBSEP_KERNELS_HPP_
#define SATBSEP_KERNELS_HPP_

#include <cstddef>
#include <cstdint>

namespace satbsep::kernels {

// Process-wide default used by the layer code; tests and the benchmark
// pass `par` explicitly.
bool parallel_enabled();
void set_parallel(bool on);

// dot product with a fixed 8-accumulator order (vectorizable without
// reassociation by the compiler).
double dot(const double* a, const double* b, std::size_t n);

// y += a * x
void axpy(double* y, double a, const double* x, std::size_t n);

// 2-D convolution geometry. Input [in_c, in_h, in_w], kernel
// [out_c, in_c, kh, kw], output [out_c, out_h, out_w]. Trailing pads may
// differ from the leading ones (even-sized "same" kernels need that).
struct Conv2dShape {
  std::size_t in_c, in_h, in_w;
  std::size_t out_c, kh, kw;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_top = 0, pad_left = 0;
  std::size_t pad_bottom = 0, pad_right = 0;

  static Conv2dShape same_pads(std::size_t in_c, std::size_t in_h, std::size_t in_w,
                               std::size_t out_c, std::size_t kh, std::size_t kw,
                               std::size_t stride_h, std::size_t stride_w,
                               std::size_t pad_h, std::size_t pad_w) {
    return {in_c, in_h, in_w, out_c, kh, kw, stride_h, stride_w,
            pad_h,  pad_w, pad_h, pad_w};
  }

  std::size_t out_h() const {
    return (in_h + pad_top + pad_bottom - kh) / stride_h + 1;
  }
  std::size_t out_w() const {
    return (in_w + pad_left + pad_right - kw) / stride_w + 1;
  }
  std::size_t patch_len() const { return in_c * kh * kw; }
  std::size_t out_positions() const { return out_h() * out_w(); }
  std::size_t col_size() const { return out_positions() * patch_len(); }
  std::size_t weight_size() const { return out_c * patch_len(); }
};

// col layout: one row per output position (row-major over out_h, out_w),
// patch_len columns. Out-of-range taps are zero.
void im2col(const Conv2dShape& s, const double* in, double* col, bool par);

// Adjoint of im2col: gathers col rows back into the input grid
// (overwrites in_grad).
void col2im(const Conv2dShape& s, const double* col, double* in_grad, bool par);

// out[o][p] = dot(w[o], col[p]) + bias[o]; bias may be null.
void conv2d_forward(const Conv2dShape& s, const double* in, const double* w,
                    const double* bias, double* out, double* col_scratch,
                    bool par);

// gw[o][k] = sum_p gout[o][p] * col[p][k]; gbias[o] = sum_p gout[o][p].
// Overwrites gw/gbias. `col` must hold the forward-pass im2col buffer.
void conv2d_grad_weight(const Conv2dShape& s, const double* gout,
                        const double* col, double* gw, double* gbias, bool par);

// gin = adjoint convolution of gout with w.
void conv2d_grad_input(const Conv2dShape& s, const double* gout,
                       const double* w, double* gin, double* col_scratch,
                       bool par);

// C[m][n] = dot(A[m], B[n]) for row-major A [M x K], B [N x K].
void gemm_abT(const double* a, std::size_t m, const double* b, std::size_t n,
              std::size_t k, double* c, bool par);

// Elementwise ops.
void leaky_relu_forward(const double* x, double* y, std::size_t n, double alpha,
                        bool par);
void leaky_relu_backward(const double* gy, const double* x, double* gx,
                         std::size_t n, double alpha, bool par);
void relu_forward(const double* x, double* y, std::size_t n, bool par);
void relu_backward(const double* gy, const double* x, double* gx, std::size_t n,
                   bool par);
void sigmoid_forward(const double* x, double* y, std::size_t n, bool par);
// gx = gy * y * (1 - y), with y the forward output.
void sigmoid_backward(const double* gy, const double* y, double* gx,
                      std::size_t n, bool par);
void tanh_forward(const double* x, double* y, std::size_t n, bool par);
void tanh_backward(const double* gy, const double* y, double* gx, std::size_t n,
                   bool par);

// Hash-based dropout mask (values 0 or 1/keep_prob); independent of thread
// count by construction.
void dropout_mask(double* mask, std::size_t n, double keep_prob,
                  std::uint64_t stream, bool par);
void multiply(const double* a, const double* b, double* out, std::size_t n,
              bool par);

// One Adam update step (t is 1-based).
void adam_step(double* w, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               std::uint64_t t, bool par);

}  // namespace satbsep::kernels

#endif  // SATBSEP_KERNELS_HPP_
