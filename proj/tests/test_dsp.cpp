#include <cmath>
#include <random>

#include "doctest.h"
#include "satbsep/dsp.hpp"

using namespace satbsep;

namespace {

AudioClip sine(double hz, double seconds, double fs = 22050.0, double amp = 0.5) {
  AudioClip c;
  c.sample_rate = fs;
  const auto n = static_cast<std::size_t>(seconds * fs);
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / fs);
  return c;
}

AudioClip noise(std::size_t n, std::uint64_t seed, double fs = 22050.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  AudioClip c;
  c.sample_rate = fs;
  c.samples.resize(n);
  for (double& s : c.samples) s = dist(rng);
  return c;
}

// Relative RMS error, skipping `skip` samples at each edge.
double rel_rms_interior(const AudioClip& a, const AudioClip& b, std::size_t skip) {
  REQUIRE(a.samples.size() == b.samples.size());
  double err = 0, ref = 0;
  for (std::size_t i = skip; i + skip < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    err += d * d;
    ref += a.samples[i] * a.samples[i];
  }
  return std::sqrt(err / ref);
}

}  // namespace

TEST_CASE("440 Hz sine peaks at bin 20") {
  const auto spec = dsp::stft(sine(440.0, 1.0));
  const Tensor mag = dsp::magnitude(spec);
  // middle frame
  const std::size_t t = spec.frames / 2;
  std::size_t best = 0;
  for (std::size_t k = 1; k < dsp::kBins; ++k)
    if (mag.at2(k, t) > mag.at2(best, t)) best = k;
  CHECK(best == 20);  // round(440 * 1024 / 22050)
}

TEST_CASE("zero audio gives zero magnitudes") {
  AudioClip c;
  c.sample_rate = 22050;
  c.samples.assign(4096, 0.0);
  const auto spec = dsp::stft(c);
  const Tensor mag = dsp::magnitude(spec);
  for (std::size_t i = 0; i < mag.size(); ++i) CHECK(mag[i] == 0.0);
}

TEST_CASE("32768 samples give 128 frames") {
  AudioClip c = noise(32768, 5);
  CHECK(dsp::stft(c).frames == 128);
  c.samples.resize(32769);
  CHECK(dsp::stft(c).frames == 129);
}

TEST_CASE("empty audio is rejected") {
  AudioClip c;
  c.sample_rate = 22050;
  CHECK_THROWS_AS(dsp::stft(c), ValueError);
}

TEST_CASE("istft(stft(x)) round trip < 1e-6 interior") {
  const AudioClip n = noise(22050, 7);
  CHECK(rel_rms_interior(n, dsp::istft(dsp::stft(n)), dsp::kFftSize) < 1e-6);

  const AudioClip s = sine(440.0, 1.0);
  CHECK(rel_rms_interior(s, dsp::istft(dsp::stft(s)), dsp::kFftSize) < 1e-6);

  // Length not a hop multiple.
  AudioClip odd = noise(10007, 8);
  CHECK(rel_rms_interior(odd, dsp::istft(dsp::stft(odd)), dsp::kFftSize) < 1e-6);
}

TEST_CASE("sine round trip keeps its peak bin") {
  const AudioClip s = sine(440.0, 1.0);
  const auto round = dsp::stft(dsp::istft(dsp::stft(s)));
  const Tensor mag = dsp::magnitude(round);
  const std::size_t t = round.frames / 2;
  std::size_t best = 0;
  for (std::size_t k = 1; k < dsp::kBins; ++k)
    if (mag.at2(k, t) > mag.at2(best, t)) best = k;
  CHECK(best == 20);
}

TEST_CASE("zero spectrogram inverts to zero audio") {
  auto spec = dsp::stft(noise(8192, 9));
  for (auto& v : spec.values) v = {0.0, 0.0};
  const AudioClip out = dsp::istft(spec);
  for (double s : out.samples) CHECK(s == 0.0);
}

TEST_CASE("Parseval sanity within 1%") {
  for (const AudioClip& clip : {noise(32768, 11), sine(300.0, 1.5)}) {
    const auto spec = dsp::stft(clip);
    double time_energy = 0;
    for (double s : clip.samples) time_energy += s * s;
    // Hann with hop N/4: sum w^2 / hop = 1.5 per sample of overlap weight.
    double spec_energy = 0;
    for (const auto& v : spec.values) spec_energy += std::norm(v);
    // Bins 1..511 represent conjugate pairs (DC once); Nyquist dropped.
    double full = 0;
    for (std::size_t t = 0; t < spec.frames; ++t) {
      full += std::norm(spec.at(0, t));
      for (std::size_t k = 1; k < dsp::kBins; ++k) full += 2.0 * std::norm(spec.at(k, t));
    }
    const double wsum_sq = 1.5 * dsp::kHop / static_cast<double>(dsp::kFftSize) *
                           static_cast<double>(dsp::kFftSize);  // = 384
    const double est = full / (static_cast<double>(dsp::kFftSize) * wsum_sq / dsp::kHop);
    CHECK(std::fabs(est - time_energy) / time_energy < 0.01);
  }
}

TEST_CASE("patch_iter offsets and padding") {
  AudioClip c = noise(32768, 12);  // 128 frames
  auto spec = dsp::stft(c);

  auto p1 = dsp::patch_iter(spec, 128);
  CHECK(p1.size() == 1);
  CHECK_FALSE(p1[0].padded);
  CHECK(p1[0].magnitude.shape() == std::vector<std::size_t>{512, 128});

  auto p2 = dsp::patch_iter(spec, 64);
  CHECK(p2.size() == 2);
  CHECK(p2[0].frame_offset == 0);
  CHECK(p2[1].frame_offset == 64);
  CHECK(p2[1].padded);
  CHECK(p2[1].valid_frames == 64);

  c.samples.resize(130 * dsp::kHop);
  spec = dsp::stft(c);
  auto p3 = dsp::patch_iter(spec, 128);
  CHECK(p3.size() == 2);
  CHECK(p3[1].valid_frames == 2);
  // padded tail must be zero
  for (std::size_t k = 0; k < 512; ++k)
    for (std::size_t t = 2; t < 128; ++t) CHECK(p3[1].magnitude.at2(k, t) == 0.0);
}

TEST_CASE("patch coverage spans all frames") {
  const auto spec = dsp::stft(noise(100 * dsp::kHop + 17, 13));
  for (std::size_t hop : {32UL, 100UL, 128UL}) {
    const auto patches = dsp::patch_iter(spec, hop);
    std::vector<bool> covered(spec.frames, false);
    for (const auto& p : patches)
      for (std::size_t t = 0; t < p.valid_frames; ++t)
        covered[p.frame_offset + t] = true;
    for (bool c : covered) CHECK(c);
  }
}

TEST_CASE("reconstruct: identity, zero and complementary masks") {
  const AudioClip mix = noise(16384, 14);
  const auto spec = dsp::stft(mix);

  Tensor ones({dsp::kBins, spec.frames});
  ones.fill(1.0);
  const AudioClip ident = dsp::reconstruct(ones, spec);
  const AudioClip direct = dsp::istft(spec);
  for (std::size_t i = 0; i < ident.samples.size(); ++i)
    CHECK(ident.samples[i] == doctest::Approx(direct.samples[i]).epsilon(1e-12));

  Tensor zeros({dsp::kBins, spec.frames});
  const AudioClip silent = dsp::reconstruct(zeros, spec);
  for (double s : silent.samples) CHECK(s == 0.0);

  std::mt19937_64 rng(99);
  Tensor m({dsp::kBins, spec.frames}), inv({dsp::kBins, spec.frames});
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    inv[i] = 1.0 - m[i];
  }
  const AudioClip a = dsp::reconstruct(m, spec);
  const AudioClip b = dsp::reconstruct(inv, spec);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] + b.samples[i] ==
          doctest::Approx(direct.samples[i]).epsilon(1e-9));

  Tensor bad({dsp::kBins, spec.frames + 1});
  CHECK_THROWS_AS(dsp::reconstruct(bad, spec), ValueError);
}
