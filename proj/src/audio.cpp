// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "satbsep/common.hpp"

namespace satbsep {

double AudioClip::peak() const {
  double p = 0.0;
  for (double s : samples) p = std::max(p, std::fabs(s));
  return p;
}

double AudioClip::rms() const {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0 && body + 16 <= bytes.size()) {
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == 0xFFFE && len >= 40) {
        // WAVE_FORMAT_EXTENSIBLE: first two bytes of the GUID carry the tag.
        format = read_u16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1);
  }
  if (channels == 0 || rate == 0 || data_off == 0)
    throw IoError("malformed WAV (missing fmt/data chunk): " + path);

  const std::size_t bytes_per = bits / 8;
  if (bytes_per == 0) throw IoError("bad bits-per-sample in " + path);
  const std::size_t frames = data_len / (bytes_per * channels);

  WavData out;
  out.sample_rate = static_cast<double>(rate);
  out.channels.assign(channels, std::vector<double>(frames));
  const unsigned char* d = bytes.data() + data_off;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = d + (i * channels + c) * bytes_per;
      double value = 0.0;
      if (format == 1 && bits == 16) {
        std::int16_t v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        value = static_cast<double>(v) / 32768.0;
      } else if (format == 1 && bits == 24) {
        std::int32_t v = static_cast<std::int32_t>(s[0] | (s[1] << 8) | (s[2] << 16));
        if (v & 0x800000) v |= static_cast<std::int32_t>(0xFF000000);
        value = static_cast<double>(v) / 8388608.0;
      } else if (format == 1 && bits == 32) {
        std::int32_t v;
        std::memcpy(&v, s, 4);
        value = static_cast<double>(v) / 2147483648.0;
      } else if (format == 3 && bits == 32) {
        float v;
        std::memcpy(&v, s, 4);
        value = static_cast<double>(v);
      } else {
        throw IoError("unsupported WAV encoding (format " + std::to_string(format) +
                      ", " + std::to_string(bits) + " bit) in " + path);
      }
      out.channels[c][i] = value;
    }
  }
  return out;
}

AudioClip to_mono(const WavData& wav) {
  AudioClip clip;
  clip.sample_rate = wav.sample_rate;
  if (wav.channels.empty()) return clip;
  const std::size_t n = wav.channels[0].size();
  clip.samples.assign(n, 0.0);
  const double inv = 1.0 / static_cast<double>(wav.channels.size());
  for (const auto& ch : wav.channels)
    for (std::size_t i = 0; i < n; ++i) clip.samples[i] += ch[i] * inv;
  return clip;
}

AudioClip read_wav_mono(const std::string& path) { return to_mono(read_wav(path)); }

void write_wav(const std::string& path, const AudioClip& clip, WavFormat format) {
  const std::size_t n = clip.samples.size();
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
  const std::uint16_t tag = format == WavFormat::pcm16 ? 1 : 3;
  const std::uint32_t byte_rate = static_cast<std::uint32_t>(clip.sample_rate) * bits / 8;
  const std::uint32_t data_len = static_cast<std::uint32_t>(n * bits / 8);

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, byte_rate);
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);
  for (double s : clip.samples) {
    if (format == WavFormat::pcm16) {
      double clipped = std::clamp(s, -1.0, 1.0);
      auto v = static_cast<std::int16_t>(std::lrint(clipped * 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    } else {
      float v = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      put_u32(out, u);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

AudioClip resample(const AudioClip& in, double target_rate) {
  if (in.sample_rate <= 0) throw ValueError("resample: clip has no sample rate");
  if (in.sample_rate == target_rate) return in;
  AudioClip out;
  out.sample_rate = target_rate;
  const double ratio = in.sample_rate / target_rate;
  const std::size_t n_out = static_cast<std::size_t>(
      std::floor(static_cast<double>(in.samples.size()) / ratio));
  out.samples.resize(n_out);
  constexpr int kTaps = 32;
  // Low-pass at the smaller of the two Nyquists, with a little headroom.
  const double cutoff = 0.95 * std::min(1.0, 1.0 / ratio);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double center = static_cast<double>(i) * ratio;
    const long lo = static_cast<long>(std::floor(center)) - kTaps + 1;
    const long hi = static_cast<long>(std::floor(center)) + kTaps;
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) {
      if (j < 0 || j >= static_cast<long>(in.samples.size())) continue;
      const double t = center - static_cast<double>(j);
      double sinc = t == 0.0 ? cutoff : std::sin(M_PI * cutoff * t) / (M_PI * t);
      const double w = 0.5 + 0.5 * std::cos(M_PI * t / kTaps);  // Hann taper
      acc += in.samples[static_cast<std::size_t>(j)] * sinc * w;
    }
    out.samples[i] = acc;
  }
  return out;
}

}  // namespace satbsep
