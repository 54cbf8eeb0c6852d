// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Times the serial and OpenMP variants of the convolution kernels at the
// layer shapes the spectrogram U-Net actually uses, and prints the speedup.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "satbsep/kernels.hpp"

using satbsep::kernels::Conv2dShape;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const auto& fn) {
  fn();  // warm-up
  const auto t0 = clock_type::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void bench_layer(const char* name, const Conv2dShape& s, int reps) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> in(s.in_c * s.in_h * s.in_w);
  std::vector<double> w(s.weight_size());
  std::vector<double> bias(s.out_c);
  std::vector<double> out(s.out_c * s.out_positions());
  std::vector<double> gout(out.size());
  std::vector<double> gw(w.size());
  std::vector<double> gbias(bias.size());
  std::vector<double> gin(in.size());
  std::vector<double> col(s.col_size());
  for (auto* v : {&in, &w, &gout})
    for (double& x : *v) x = dist(rng);

  const double gmacs =
      1e-9 * static_cast<double>(s.out_c) * s.out_positions() * s.patch_len();

  auto run = [&](bool par) {
    struct Result { double fwd, gw, gin; } r{};
    r.fwd = time_ms(reps, [&] {
      satbsep::kernels::conv2d_forward(s, in.data(), w.data(), bias.data(),
                                       out.data(), col.data(), par);
    });
    r.gw = time_ms(reps, [&] {
      satbsep::kernels::conv2d_grad_weight(s, gout.data(), col.data(), gw.data(),
                                           gbias.data(), par);
    });
    r.gin = time_ms(reps, [&] {
      satbsep::kernels::conv2d_grad_input(s, gout.data(), w.data(), gin.data(),
                                          col.data(), par);
    });
    return r;
  };

  const auto serial = run(false);
  const auto parallel = run(true);
  std::printf("%-10s %6.2f GMAC |%s\n", name, gmacs, "");
  std::printf("  forward     serial %8.2f ms  omp %8.2f ms  speedup %.2fx  (%.1f GMAC/s)\n",
              serial.fwd, parallel.fwd, serial.fwd / parallel.fwd,
              gmacs / (parallel.fwd * 1e-3));
  std::printf("  grad_weight serial %8.2f ms  omp %8.2f ms  speedup %.2fx\n",
              serial.gw, parallel.gw, serial.gw / parallel.gw);
  std::printf("  grad_input  serial %8.2f ms  omp %8.2f ms  speedup %.2fx\n",
              serial.gin, parallel.gin, serial.gin / parallel.gin);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  // Encoder layers of the 512x128 spectrogram U-Net.
  bench_layer("enc1", Conv2dShape::same_pads(1, 512, 128, 16, 5, 5, 2, 2, 2, 2), 5);
  bench_layer("enc2", Conv2dShape::same_pads(16, 256, 64, 32, 5, 5, 2, 2, 2, 2), 5);
  bench_layer("enc3", Conv2dShape::same_pads(32, 128, 32, 64, 5, 5, 2, 2, 2, 2), 5);
  bench_layer("enc4", Conv2dShape::same_pads(64, 64, 16, 128, 5, 5, 2, 2, 2, 2), 5);
  bench_layer("enc5", Conv2dShape::same_pads(128, 32, 8, 256, 5, 5, 2, 2, 2, 2), 5);
  bench_layer("enc6", Conv2dShape::same_pads(256, 16, 4, 512, 5, 5, 2, 2, 2, 2), 5);
  // Condition-generator conv (time sequence, 360 channels, kernel 10).
  bench_layer("ds-conv", {360, 1, 128, 64, 1, 10, 1, 1, 0, 4, 0, 5}, 20);
  return 0;
}
