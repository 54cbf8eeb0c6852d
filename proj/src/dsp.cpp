// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/dsp.hpp"

#include <cmath>

#include "satbsep/common.hpp"
#include "satbsep/fft.hpp"

namespace satbsep::dsp {

namespace {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

// Reflect index into [0, n), folding as often as needed (no edge repeat).
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

Spectrogram stft(const AudioClip& audio) {
  if (audio.samples.empty()) throw ValueError("stft: empty audio");
  if (audio.sample_rate <= 0) throw ValueError("stft: clip has no sample rate");

  const std::size_t n = audio.samples.size();
  const std::size_t pad = kFftSize / 2;
  const std::size_t frames = (n + kHop - 1) / kHop;

  Spectrogram spec;
  spec.frames = frames;
  spec.sample_rate = audio.sample_rate;
  spec.n_samples = n;
  spec.values.assign(kBins * frames, {0.0, 0.0});

  const std::vector<double> window = hann_window(kFftSize);
  RealFft fft(kFftSize);
  std::vector<double> frame(kFftSize);
  std::vector<std::complex<double>> out(fft.bins());

  for (std::size_t t = 0; t < frames; ++t) {
    // Frame t covers padded samples [t*hop, t*hop + fft), i.e. it is
    // centered on original sample t*hop.
    const long start = static_cast<long>(t * kHop) - static_cast<long>(pad);
    for (std::size_t i = 0; i < kFftSize; ++i) {
      const long idx = start + static_cast<long>(i);
      const double s =
          (idx >= 0 && idx < static_cast<long>(n))
              ? audio.samples[static_cast<std::size_t>(idx)]
              : audio.samples[reflect_index(idx, static_cast<long>(n))];
      frame[i] = s * window[i];
    }
    fft.forward(frame.data(), out.data());
    for (std::size_t k = 0; k < kBins; ++k) spec.at(k, t) = out[k];
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec) {
  if (spec.frames == 0) throw ValueError("istft: empty spectrogram");
  const std::size_t pad = spec.fft_size / 2;
  const std::size_t padded_len = (spec.frames - 1) * spec.hop + spec.fft_size;
  const std::size_t n_out =
      spec.n_samples > 0 ? spec.n_samples : spec.frames * spec.hop;

  const std::vector<double> window = hann_window(spec.fft_size);
  RealFft fft(spec.fft_size);
  std::vector<std::complex<double>> bins(fft.bins(), {0.0, 0.0});
  std::vector<double> frame(spec.fft_size);
  std::vector<double> acc(padded_len, 0.0);
  std::vector<double> wsum(padded_len, 0.0);

  for (std::size_t t = 0; t < spec.frames; ++t) {
    for (std::size_t k = 0; k < kBins; ++k) bins[k] = spec.at(k, t);
    bins[kBins] = {0.0, 0.0};  // dropped Nyquist bin restored as zero
    fft.inverse(bins.data(), frame.data());
    const std::size_t off = t * spec.hop;
    for (std::size_t i = 0; i < spec.fft_size; ++i) {
      acc[off + i] += frame[i] * window[i];
      wsum[off + i] += window[i] * window[i];
    }
  }

  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const std::size_t p = i + pad;
    clip.samples[i] = wsum[p] > 1e-12 ? acc[p] / wsum[p] : 0.0;
  }
  return clip;
}

Tensor magnitude(const Spectrogram& spec) {
  Tensor mag({kBins, spec.frames});
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    mag[i] = std::abs(spec.values[i]);
  return mag;
}

std::vector<Patch> patch_iter(const Spectrogram& spec, std::size_t hop_frames) {
  if (hop_frames < 1 || hop_frames > kPatchFrames)
    throw ValueError("patch_iter: hop_frames must be in [1, 128]");
  std::vector<Patch> patches;
  for (std::size_t off = 0; off < spec.frames; off += hop_frames) {
    Patch p;
    p.frame_offset = off;
    p.valid_frames = std::min(kPatchFrames, spec.frames - off);
    p.padded = p.valid_frames < kPatchFrames;
    p.magnitude = Tensor({kBins, kPatchFrames});
    for (std::size_t k = 0; k < kBins; ++k)
      for (std::size_t t = 0; t < p.valid_frames; ++t)
        p.magnitude.at2(k, t) = std::abs(spec.at(k, off + t));
    patches.push_back(std::move(p));
  }
  return patches;
}

AudioClip reconstruct(const Tensor& mask, const Spectrogram& mixture) {
  require_shape(mask, {kBins, mixture.frames}, "reconstruct mask");
  Spectrogram masked = mixture;
  for (std::size_t i = 0; i < masked.values.size(); ++i)
    masked.values[i] *= mask[i];
  return istft(masked);
}

}  // namespace satbsep::dsp
