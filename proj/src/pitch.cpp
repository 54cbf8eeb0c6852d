// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "satbsep/common.hpp"
#include "satbsep/fft.hpp"

namespace satbsep::pitch {

std::size_t hz_to_bin(double f0_hz) {
  if (f0_hz <= 0.0)
    throw ValueError("hz_to_bin: frequency must be positive (unvoiced frames "
                     "must be routed around the bin mapping)");
  const double raw = static_cast<double>(kBinsPerOctave) *
                     std::log2(f0_hz / kBinBaseHz);
  const long bin = std::lround(raw);
  if (bin < 0) {
    std::fprintf(stderr, "[pitch] warning: %.2f Hz below control grid, clamping to bin 0\n",
                 f0_hz);
    return 0;
  }
  if (bin >= static_cast<long>(kControlBins)) {
    std::fprintf(stderr, "[pitch] warning: %.2f Hz above control grid, clamping to bin %zu\n",
                 f0_hz, kControlBins - 1);
    return kControlBins - 1;
  }
  return static_cast<std::size_t>(bin);
}

double bin_to_hz(std::size_t bin) {
  return kBinBaseHz * std::pow(2.0, static_cast<double>(bin) /
                                        static_cast<double>(kBinsPerOctave));
}

ControlMatrix encode_control(const F0Track& f0, std::size_t frame_offset) {
  ControlMatrix cm;
  for (std::size_t t = 0; t < dsp::kPatchFrames; ++t) {
    const std::size_t idx = frame_offset + t;
    if (idx >= f0.frames() || !f0.voiced(idx)) continue;
    cm.values.at2(t, hz_to_bin(f0.values[idx])) = 1.0;
  }
  return cm;
}

namespace {

struct BandEvents {
  // Event times in samples (fractional), one array per event kind:
  // rising zero crossings, falling zero crossings, peaks, dips.
  std::vector<double> events[4];
};

// Brick-wall low-pass via full-signal FFT (zero phase).
std::vector<double> brickwall_lowpass(const std::vector<double>& x, double fs,
                                      double cutoff_hz) {
  const std::size_t n = x.size();
  const std::size_t nfft = next_pow2(n);
  RealFft fft(nfft);
  std::vector<double> padded(nfft, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  std::vector<std::complex<double>> bins(fft.bins());
  fft.forward(padded.data(), bins.data());
  const double bin_hz = fs / static_cast<double>(nfft);
  for (std::size_t k = 0; k < bins.size(); ++k)
    if (static_cast<double>(k) * bin_hz > cutoff_hz) bins[k] = {0.0, 0.0};
  std::vector<double> y(nfft);
  fft.inverse(bins.data(), y.data());
  y.resize(n);
  return y;
}

BandEvents find_events(const std::vector<double>& s) {
  BandEvents ev;
  const std::size_t n = s.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] < 0.0 && s[i] >= 0.0) {
      const double d = s[i] - s[i - 1];
      ev.events[0].push_back(static_cast<double>(i - 1) + (d != 0.0 ? -s[i - 1] / d : 0.5));
    }
    if (s[i - 1] > 0.0 && s[i] <= 0.0) {
      const double d = s[i] - s[i - 1];
      ev.events[1].push_back(static_cast<double>(i - 1) + (d != 0.0 ? -s[i - 1] / d : 0.5));
    }
    if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > 0.0) {
      const double denom = s[i - 1] - 2.0 * s[i] + s[i + 1];
      const double delta = denom != 0.0 ? 0.5 * (s[i - 1] - s[i + 1]) / denom : 0.0;
      ev.events[2].push_back(static_cast<double>(i) + std::clamp(delta, -0.5, 0.5));
    }
    if (s[i] < s[i - 1] && s[i] <= s[i + 1] && s[i] < 0.0) {
      const double denom = s[i - 1] - 2.0 * s[i] + s[i + 1];
      const double delta = denom != 0.0 ? 0.5 * (s[i - 1] - s[i + 1]) / denom : 0.0;
      ev.events[3].push_back(static_cast<double>(i) + std::clamp(delta, -0.5, 0.5));
    }
  }
  return ev;
}

// Length of the inter-event interval containing time tc, or 0 if none.
double interval_at(const std::vector<double>& events, double tc) {
  if (events.size() < 2) return 0.0;
  auto it = std::upper_bound(events.begin(), events.end(), tc);
  if (it == events.begin() || it == events.end()) return 0.0;
  return *it - *(it - 1);
}

constexpr double kDispersionThreshold = 0.10;
constexpr double kSilenceRms = 1e-4;  // -80 dBFS
constexpr double kMinF0 = 38.0;
constexpr double kMaxF0 = 1200.0;

}  // namespace

F0Track estimate_f0(const AudioClip& audio) {
  if (audio.sample_rate <= 0) throw ValueError("estimate_f0: clip has no sample rate");
  const double fs = audio.sample_rate;
  const std::size_t n = audio.samples.size();
  const std::size_t frames = n == 0 ? 0 : (n + dsp::kHop - 1) / dsp::kHop;

  F0Track track;
  track.hop = dsp::kHop;
  track.sample_rate = fs;
  track.values.assign(frames, 0.0);

  // Shorter than two periods of 40 Hz: nothing to measure.
  if (static_cast<double>(n) < 2.0 * fs / 40.0) return track;

  // Half-octave-ish bank spanning 40-1000 Hz.
  constexpr std::size_t kBands = 12;
  std::vector<double> cutoffs(kBands);
  for (std::size_t b = 0; b < kBands; ++b)
    cutoffs[b] = 40.0 * std::pow(1000.0 / 40.0,
                                 static_cast<double>(b) / (kBands - 1));

  double total_rms = 0.0;
  for (double s : audio.samples) total_rms += s * s;
  total_rms = std::sqrt(total_rms / static_cast<double>(n));

  std::vector<double> best_disp(frames, 1e9);
  std::vector<double> best_f0(frames, 0.0);
  std::vector<long> best_band(frames, -1);

#pragma omp parallel for schedule(dynamic, 1)
  for (long bi = 0; bi < static_cast<long>(kBands); ++bi) {
    const double cutoff = cutoffs[static_cast<std::size_t>(bi)];
    const std::vector<double> filtered =
        brickwall_lowpass(audio.samples, fs, cutoff);
    double band_rms = 0.0;
    for (double s : filtered) band_rms += s * s;
    band_rms = std::sqrt(band_rms / static_cast<double>(n));
    if (band_rms < 1e-3 * total_rms || band_rms < kSilenceRms) continue;

    const BandEvents ev = find_events(filtered);
    std::vector<double> f0s(frames, 0.0), disps(frames, 1e9);
    for (std::size_t t = 0; t < frames; ++t) {
      const double tc = static_cast<double>(t * dsp::kHop);
      double lens[4];
      bool ok = true;
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) {
        lens[k] = interval_at(ev.events[k], tc);
        if (lens[k] <= 0.0) { ok = false; break; }
        sum += lens[k];
      }
      if (!ok) continue;
      const double mean = sum / 4.0;
      double var = 0.0;
      for (double len : lens) var += (len - mean) * (len - mean);
      const double disp = std::sqrt(var / 4.0) / mean;
      const double f0 = 4.0 * fs / sum;
      if (f0 < kMinF0 || f0 > kMaxF0 || f0 > 1.25 * cutoff) continue;
      f0s[t] = f0;
      disps[t] = disp;
    }
    // Band-index tiebreak keeps the merge independent of thread order.
#pragma omp critical
    for (std::size_t t = 0; t < frames; ++t) {
      if (disps[t] < best_disp[t] ||
          (disps[t] == best_disp[t] && (best_band[t] < 0 || bi < best_band[t]))) {
        best_disp[t] = disps[t];
        best_f0[t] = f0s[t];
        best_band[t] = bi;
      }
    }
  }

  for (std::size_t t = 0; t < frames; ++t) {
    // Local energy gate: dead frames stay unvoiced even if a band found
    // spurious intervals nearby.
    const std::size_t c = t * dsp::kHop;
    const std::size_t w0 = c >= dsp::kHop ? c - dsp::kHop : 0;
    const std::size_t w1 = std::min(n, c + dsp::kHop);
    double rms = 0.0;
    for (std::size_t i = w0; i < w1; ++i) rms += audio.samples[i] * audio.samples[i];
    rms = std::sqrt(rms / static_cast<double>(w1 - w0));
    if (rms >= kSilenceRms && best_disp[t] <= kDispersionThreshold)
      track.values[t] = best_f0[t];
  }
  return track;
}

F0Track load_oracle_f0(const std::string& path, std::size_t n_frames,
                       std::size_t hop, double sample_rate) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open F0 CSV: " + path);

  std::vector<double> times, freqs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.find_first_not_of("0123456789.,-+eE \r") != std::string::npos)
      continue;  // header row
    std::istringstream ss(line);
    std::string t_str, f_str, extra;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, f_str, ',') ||
        std::getline(ss, extra, ','))
      throw SchemaError(path + ": line " + std::to_string(lineno) +
                        ": expected `time_s,f0_hz`");
    const auto parse = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (s.find_first_not_of(" \t\r", used) != std::string::npos)
          throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw SchemaError(path + ": line " + std::to_string(lineno) +
                          ": malformed number `" + s + "`");
      }
    };
    times.push_back(parse(t_str));
    freqs.push_back(parse(f_str));
  }

  F0Track track;
  track.hop = hop;
  track.sample_rate = sample_rate;
  track.values.assign(n_frames, 0.0);
  if (times.empty()) return track;

  // Typical row spacing, for the out-of-extent test.
  double dt = static_cast<double>(hop) / sample_rate;
  if (times.size() >= 2) dt = (times.back() - times.front()) /
                              static_cast<double>(times.size() - 1);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const double tc = static_cast<double>(t * hop) / sample_rate;
    if (tc < times.front() - dt || tc > times.back() + dt) continue;
    auto it = std::lower_bound(times.begin(), times.end(), tc);
    std::size_t idx;
    if (it == times.end()) {
      idx = times.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - times.begin());
      if (idx > 0 && tc - times[idx - 1] <= times[idx] - tc) idx -= 1;
    }
    track.values[t] = std::max(0.0, freqs[idx]);
  }
  return track;
}

void save_f0_csv(const std::string& path, const F0Track& track) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "time_s,f0_hz\n";
  char buf[64];
  for (std::size_t t = 0; t < track.frames(); ++t) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.4f\n", track.frame_time_s(t),
                  track.values[t]);
    f << buf;
  }
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace satbsep::pitch
