// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SATBSEP_AUDIO_HPP_
#define SATBSEP_AUDIO_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace satbsep {

// Mono sample buffer; the unit of all time-domain I/O.
struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 0.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  double peak() const;
  double rms() const;
};

// Raw WAV contents prior to curation (possibly multi-channel).
struct WavData {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;
};

enum class WavFormat { pcm16, float32 };

WavData read_wav(const std::string& path);
// Convenience: channel-mean mono read.
AudioClip read_wav_mono(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip,
               WavFormat format = WavFormat::float32);

// Windowed-sinc resampler (Hann-windowed, 32 taps per side).
AudioClip resample(const AudioClip& in, double target_rate);

// Channel mean.
AudioClip to_mono(const WavData& wav);

}  // namespace satbsep

#endif  // SATBSEP_AUDIO_HPP_
