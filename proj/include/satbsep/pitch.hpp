// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// F0 estimation and the one-hot control encoding fed to the condition
// generators: 60 bins per octave over 6 octaves from a 32.7 Hz base, 360
// bins total.

#ifndef SATBSEP_PITCH_HPP_
#define SATBSEP_PITCH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "satbsep/audio.hpp"
#include "satbsep/dsp.hpp"
#include "satbsep/tensor.hpp"

namespace satbsep::pitch {

// Bin-grid constants (read-only configuration).
constexpr double kBinBaseHz = 32.7;
constexpr std::size_t kBinsPerOctave = 60;
constexpr std::size_t kOctaves = 6;
constexpr std::size_t kControlBins = kBinsPerOctave * kOctaves;  // 360

// Per-frame fundamental frequency in Hz; 0 = unvoiced. Frame timing is the
// dsp module's grid (frame t is centered on sample t*hop).
struct F0Track {
  std::vector<double> values;
  std::size_t hop = dsp::kHop;
  double sample_rate = 0.0;

  std::size_t frames() const { return values.size(); }
  bool voiced(std::size_t t) const { return values[t] > 0.0; }
  double frame_time_s(std::size_t t) const {
    return static_cast<double>(t * hop) / sample_rate;
  }
};

// One-hot F0 matrix for one 128-frame window: [128 x 360], each row all
// zero (unvoiced) or with exactly one 1.
struct ControlMatrix {
  Tensor values{std::vector<std::size_t>{dsp::kPatchFrames, kControlBins}};
};

// round(60*log2(f/32.7)) clamped to [0,359]. f <= 0 throws; positive
// frequencies outside the grid clamp to the edge bin (rare for SATB).
std::size_t hz_to_bin(double f0_hz);

// Center frequency of a bin.
double bin_to_hz(std::size_t bin);

// Rows [frame_offset, frame_offset+128) of the track, one-hot encoded.
// Frames beyond the track end are unvoiced.
ControlMatrix encode_control(const F0Track& f0, std::size_t frame_offset = 0);

// DIO-style estimator: a bank of brick-wall low-pass filters spanning
// 40-1000 Hz; per band the four event-interval lengths (rising/falling
// zero crossings, peaks, dips) around each frame give a period candidate
// 4/(sum of interval lengths) and a dispersion score; the lowest-dispersion
// candidate wins, frames above the dispersion threshold are unvoiced.
F0Track estimate_f0(const AudioClip& audio);

// Oracle F0 from a `time_s,f0_hz` CSV, resampled to the frame grid by
// nearest-time lookup; times beyond the file extent are unvoiced.
F0Track load_oracle_f0(const std::string& path, std::size_t n_frames,
                       std::size_t hop, double sample_rate);

void save_f0_csv(const std::string& path, const F0Track& track);

}  // namespace satbsep::pitch

#endif  // SATBSEP_PITCH_HPP_
