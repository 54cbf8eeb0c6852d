// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

#include "satbsep/common.hpp"

namespace satbsep::kernels {

namespace {

std::atomic<bool> g_parallel{true};

// Tile of output positions kept hot in L2 while all output channels walk it.
constexpr std::size_t kTileP = 64;

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 += a[i + 0] * b[i + 0];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
    s4 += a[i + 4] * b[i + 4];
    s5 += a[i + 5] * b[i + 5];
    s6 += a[i + 6] * b[i + 6];
    s7 += a[i + 7] * b[i + 7];
  }
  double tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return (((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7))) + tail;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void im2col(const Conv2dShape& s, const double* in, double* col, bool par) {
  const std::size_t oh = s.out_h(), ow = s.out_w(), plen = s.patch_len();
  const long in_h = static_cast<long>(s.in_h), in_w = static_cast<long>(s.in_w);
#pragma omp parallel for schedule(static) if (par)
  for (long oy = 0; oy < static_cast<long>(oh); ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      double* row = col + (static_cast<std::size_t>(oy) * ow + ox) * plen;
      const long y0 = oy * static_cast<long>(s.stride_h) - static_cast<long>(s.pad_top);
      const long x0 = static_cast<long>(ox * s.stride_w) - static_cast<long>(s.pad_left);
      std::size_t k = 0;
      for (std::size_t c = 0; c < s.in_c; ++c) {
        const double* plane = in + c * s.in_h * s.in_w;
        for (std::size_t ky = 0; ky < s.kh; ++ky) {
          const long iy = y0 + static_cast<long>(ky);
          if (iy < 0 || iy >= in_h) {
            for (std::size_t kx = 0; kx < s.kw; ++kx) row[k++] = 0.0;
            continue;
          }
          const double* line = plane + static_cast<std::size_t>(iy) * s.in_w;
          for (std::size_t kx = 0; kx < s.kw; ++kx) {
            const long ix = x0 + static_cast<long>(kx);
            row[k++] = (ix < 0 || ix >= in_w) ? 0.0 : line[ix];
          }
        }
      }
    }
  }
}

void col2im(const Conv2dShape& s, const double* col, double* in_grad, bool par) {
  const std::size_t ow = s.out_w(), oh = s.out_h(), plen = s.patch_len();
#pragma omp parallel for schedule(static) if (par)
  for (long ciy = 0; ciy < static_cast<long>(s.in_c * s.in_h); ++ciy) {
    const std::size_t c = static_cast<std::size_t>(ciy) / s.in_h;
    const std::size_t iy = static_cast<std::size_t>(ciy) % s.in_h;
    double* line = in_grad + (c * s.in_h + iy) * s.in_w;
    for (std::size_t ix = 0; ix < s.in_w; ++ix) {
      double acc = 0.0;
      // Gather every kernel tap that touched (c, iy, ix).
      for (std::size_t ky = 0; ky < s.kh; ++ky) {
        const long num_y = static_cast<long>(iy + s.pad_top) - static_cast<long>(ky);
        if (num_y < 0 || num_y % static_cast<long>(s.stride_h)) continue;
        const std::size_t oy = static_cast<std::size_t>(num_y) / s.stride_h;
        if (oy >= oh) continue;
        for (std::size_t kx = 0; kx < s.kw; ++kx) {
          const long num_x = static_cast<long>(ix + s.pad_left) - static_cast<long>(kx);
          if (num_x < 0 || num_x % static_cast<long>(s.stride_w)) continue;
          const std::size_t ox = static_cast<std::size_t>(num_x) / s.stride_w;
          if (ox >= ow) continue;
          const std::size_t p = oy * ow + ox;
          acc += col[p * plen + (c * s.kh + ky) * s.kw + kx];
        }
      }
      line[ix] = acc;
    }
  }
}

void conv2d_forward(const Conv2dShape& s, const double* in, const double* w,
                    const double* bias, double* out, double* col_scratch,
                    bool par) {
  im2col(s, in, col_scratch, par);
  const std::size_t np = s.out_positions(), plen = s.patch_len();
  const std::size_t ntiles = ceil_div(np, kTileP);
  const long tasks = static_cast<long>(s.out_c * ntiles);
#pragma omp parallel for schedule(static) if (par)
  for (long task = 0; task < tasks; ++task) {
    const std::size_t o = static_cast<std::size_t>(task) / ntiles;
    const std::size_t tile = static_cast<std::size_t>(task) % ntiles;
    const std::size_t p0 = tile * kTileP;
    const std::size_t p1 = std::min(np, p0 + kTileP);
    const double* wrow = w + o * plen;
    const double b = bias ? bias[o] : 0.0;
    double* orow = out + o * np;
    for (std::size_t p = p0; p < p1; ++p)
      orow[p] = dot(wrow, col_scratch + p * plen, plen) + b;
  }
}

void conv2d_grad_weight(const Conv2dShape& s, const double* gout,
                        const double* col, double* gw, double* gbias, bool par) {
  const std::size_t np = s.out_positions(), plen = s.patch_len();
  std::memset(gw, 0, s.weight_size() * sizeof(double));
  // Tiles run serially so each gw row accumulates in ascending p order
  // regardless of thread count.
  for (std::size_t p0 = 0; p0 < np; p0 += kTileP) {
    const std::size_t p1 = std::min(np, p0 + kTileP);
#pragma omp parallel for schedule(static) if (par)
    for (long o = 0; o < static_cast<long>(s.out_c); ++o) {
      double* grow = gw + static_cast<std::size_t>(o) * plen;
      const double* gorow = gout + static_cast<std::size_t>(o) * np;
      for (std::size_t p = p0; p < p1; ++p)
        axpy(grow, gorow[p], col + p * plen, plen);
    }
  }
  if (gbias) {
#pragma omp parallel for schedule(static) if (par)
    for (long o = 0; o < static_cast<long>(s.out_c); ++o) {
      double acc = 0.0;
      const double* gorow = gout + static_cast<std::size_t>(o) * np;
      for (std::size_t p = 0; p < np; ++p) acc += gorow[p];
      gbias[o] = acc;
    }
  }
}

void conv2d_grad_input(const Conv2dShape& s, const double* gout, const double* w,
                       double* gin, double* col_scratch, bool par) {
  const std::size_t np = s.out_positions(), plen = s.patch_len();
#pragma omp parallel for schedule(static) if (par)
  for (long p = 0; p < static_cast<long>(np); ++p) {
    double* crow = col_scratch + static_cast<std::size_t>(p) * plen;
    std::memset(crow, 0, plen * sizeof(double));
    for (std::size_t o = 0; o < s.out_c; ++o)
      axpy(crow, gout[o * np + static_cast<std::size_t>(p)], w + o * plen, plen);
  }
  col2im(s, col_scratch, gin, par);
}

void gemm_abT(const double* a, std::size_t m, const double* b, std::size_t n,
              std::size_t k, double* c, bool par) {
  const long tasks = static_cast<long>(m * n);
#pragma omp parallel for schedule(static) if (par)
  for (long t = 0; t < tasks; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) / n;
    const std::size_t j = static_cast<std::size_t>(t) % n;
    c[i * n + j] = dot(a + i * k, b + j * k, k);
  }
}

#define SATBSEP_ELEMENTWISE(expr)                       \
  _Pragma("omp parallel for schedule(static) if (par)") \
  for (long i = 0; i < static_cast<long>(n); ++i) {     \
    expr;                                               \
  }

void leaky_relu_forward(const double* x, double* y, std::size_t n, double alpha,
                        bool par) {
  SATBSEP_ELEMENTWISE(y[i] = x[i] > 0 ? x[i] : alpha * x[i])
}

void leaky_relu_backward(const double* gy, const double* x, double* gx,
                         std::size_t n, double alpha, bool par) {
  SATBSEP_ELEMENTWISE(gx[i] = x[i] > 0 ? gy[i] : alpha * gy[i])
}

void relu_forward(const double* x, double* y, std::size_t n, bool par) {
  SATBSEP_ELEMENTWISE(y[i] = x[i] > 0 ? x[i] : 0.0)
}

void relu_backward(const double* gy, const double* x, double* gx, std::size_t n,
                   bool par) {
  SATBSEP_ELEMENTWISE(gx[i] = x[i] > 0 ? gy[i] : 0.0)
}

void sigmoid_forward(const double* x, double* y, std::size_t n, bool par) {
  SATBSEP_ELEMENTWISE(y[i] = 1.0 / (1.0 + std::exp(-x[i])))
}

void sigmoid_backward(const double* gy, const double* y, double* gx,
                      std::size_t n, bool par) {
  SATBSEP_ELEMENTWISE(gx[i] = gy[i] * y[i] * (1.0 - y[i]))
}

void tanh_forward(const double* x, double* y, std::size_t n, bool par) {
  SATBSEP_ELEMENTWISE(y[i] = std::tanh(x[i]))
}

void tanh_backward(const double* gy, const double* y, double* gx, std::size_t n,
                   bool par) {
  SATBSEP_ELEMENTWISE(gx[i] = gy[i] * (1.0 - y[i] * y[i]))
}

void dropout_mask(double* mask, std::size_t n, double keep_prob,
                  std::uint64_t stream, bool par) {
  if (keep_prob <= 0.0 || keep_prob > 1.0)
    throw ValueError("dropout keep probability must be in (0,1]");
  const double inv = 1.0 / keep_prob;
  SATBSEP_ELEMENTWISE(
      mask[i] = hash_to_unit(splitmix64(stream ^ static_cast<std::uint64_t>(i))) <
                        keep_prob
                    ? inv
                    : 0.0)
}

void multiply(const double* a, const double* b, double* out, std::size_t n,
              bool par) {
  SATBSEP_ELEMENTWISE(out[i] = a[i] * b[i])
}

void adam_step(double* w, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               std::uint64_t t, bool par) {
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  SATBSEP_ELEMENTWISE({
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mh = m[i] / bc1;
    const double vh = v[i] / bc2;
    w[i] -= lr * mh / (std::sqrt(vh) + eps);
  })
}

#undef SATBSEP_ELEMENTWISE

}  // namespace satbsep::kernels
