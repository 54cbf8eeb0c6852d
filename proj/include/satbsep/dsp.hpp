// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Time-frequency frontend: STFT/ISTFT, magnitude patches for the models,
// and mask-based reconstruction.

#ifndef SATBSEP_DSP_HPP_
#define SATBSEP_DSP_HPP_

#include <complex>
#include <cstddef>
#include <vector>

#include "satbsep/audio.hpp"
#include "satbsep/tensor.hpp"

namespace satbsep::dsp {

// Analysis defaults: 1024-point FFT, hop 256, Hann window. The Nyquist bin
// of the 1024-point transform is dropped so the model I/O is exactly 512
// bins; it is restored as zero on inversion.
constexpr std::size_t kFftSize = 1024;
constexpr std::size_t kHop = 256;
constexpr std::size_t kBins = 512;
constexpr std::size_t kPatchFrames = 128;

struct Spectrogram {
  // Row-major [kBins x frames]: row = frequency bin, column = frame.
  std::vector<std::complex<double>> values;
  std::size_t frames = 0;
  double sample_rate = 0.0;
  std::size_t fft_size = kFftSize;
  std::size_t hop = kHop;
  // Original clip length; istft trims to this.
  std::size_t n_samples = 0;

  std::complex<double>& at(std::size_t bin, std::size_t frame) {
    return values[bin * frames + frame];
  }
  std::complex<double> at(std::size_t bin, std::size_t frame) const {
    return values[bin * frames + frame];
  }
  double frame_time_s(std::size_t frame) const {
    return static_cast<double>(frame * hop) / sample_rate;
  }
};

struct Patch {
  Tensor magnitude;  // [kBins x kPatchFrames]
  std::size_t frame_offset = 0;
  std::size_t valid_frames = 0;  // frames copied from the source
  bool padded = false;           // zero-padded tail
};

// frames = ceil(len / hop); reflect padding at the edges. Throws on empty
// input.
Spectrogram stft(const AudioClip& audio);

// Weighted overlap-add with window-sum normalization; inverse of stft on
// the unpadded interior to ~1e-12 relative RMS.
AudioClip istft(const Spectrogram& spec);

// Magnitudes as a [kBins x frames] tensor.
Tensor magnitude(const Spectrogram& spec);

// Splits a spectrogram into 128-frame magnitude patches starting at
// offsets 0, hop_frames, 2*hop_frames, ... < frames. The tail patch is
// zero-padded and flagged. hop_frames must be in [1, 128].
std::vector<Patch> patch_iter(const Spectrogram& spec, std::size_t hop_frames);

// source = mask (.) mixture, phase reused from the mixture, then istft.
// mask is [kBins x frames] with values in [0,1].
AudioClip reconstruct(const Tensor& mask, const Spectrogram& mixture);

}  // namespace satbsep::dsp

#endif  // SATBSEP_DSP_HPP_
