// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "satbsep/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "satbsep/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace satbsep::corpus {

PartRange part_range(VoicePart part) {
  switch (part) {
    case VoicePart::soprano: return {260.0, 880.0};
    case VoicePart::alto: return {190.0, 660.0};
    case VoicePart::tenor: return {145.0, 440.0};
    case VoicePart::bass: return {90.0, 290.0};
  }
  throw ValueError("unknown voice part");
}

const char* part_name(VoicePart part) {
  switch (part) {
    case VoicePart::soprano: return "soprano";
    case VoicePart::alto: return "alto";
    case VoicePart::tenor: return "tenor";
    case VoicePart::bass: return "bass";
  }
  return "?";
}

VoicePart part_from_name(const std::string& name) {
  for (VoicePart p : kParts)
    if (name == part_name(p)) return p;
  throw ValueError("unknown voice part name: " + name);
}

namespace {

double midi_to_hz(double m) { return 440.0 * std::pow(2.0, (m - 69.0) / 12.0); }

double cents_ratio(double cents) { return std::pow(2.0, cents / 1200.0); }

struct Formants {
  double center[3];
  double bandwidth[3] = {90.0, 120.0, 160.0};
  double amp[3] = {1.0, 0.63, 0.35};

  double gain(double hz) const {
    double g = 0.05;
    for (int i = 0; i < 3; ++i) {
      const double d = (hz - center[i]) / bandwidth[i];
      g += amp[i] / (1.0 + d * d);
    }
    return g;
  }
};

constexpr double kVibratoRateHz = 5.0;
constexpr double kVibratoDepthCents = 20.0;
constexpr double kAttackS = 0.02;
constexpr double kReleaseS = 0.03;
constexpr double kStemPeak = 0.95;

void peak_normalize(AudioClip& clip, double target) {
  const double p = clip.peak();
  if (p <= 0.0) return;
  const double g = target / p;
  for (double& s : clip.samples) s *= g;
}

}  // namespace

Stem synthesize_stem(VoicePart part, const Score& score, double sample_rate,
                     std::uint64_t seed) {
  if (sample_rate < 16000.0)
    throw ValueError("synthesize_stem: sample rate must be >= 16000 Hz");
  const PartRange range = part_range(part);
  for (const Note& note : score) {
    if (note.hz != 0.0 && (note.hz < range.f0_min || note.hz > range.f0_max))
      throw ValueError("synthesize_stem: note " + std::to_string(note.hz) +
                       " Hz outside " + part_name(part) + " range [" +
                       std::to_string(range.f0_min) + "," +
                       std::to_string(range.f0_max) + "] Hz");
    if (note.duration_s <= 0.0)
      throw ValueError("synthesize_stem: non-positive note duration");
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const double detune_cents = uniform(-12.0, 12.0);
  const double vib_phase = uniform(0.0, 2.0 * M_PI);
  const double lfo_rate = uniform(0.2, 0.8);
  const double lfo_phase = uniform(0.0, 2.0 * M_PI);
  Formants formants;
  formants.center[0] = uniform(450.0, 850.0);
  formants.center[1] = uniform(1100.0, 1800.0);
  formants.center[2] = uniform(2400.0, 3000.0);

  std::size_t total = 0;
  for (const Note& note : score)
    total += static_cast<std::size_t>(std::llround(note.duration_s * sample_rate));

  Stem stem;
  stem.part = part;
  stem.audio.sample_rate = sample_rate;
  stem.audio.samples.assign(total, 0.0);
  stem.f0.hop = dsp::kHop;
  stem.f0.sample_rate = sample_rate;
  stem.f0.values.assign(total == 0 ? 0 : (total + dsp::kHop - 1) / dsp::kHop, 0.0);
  stem.has_f0 = true;

  const double nyquist_cap = 0.95 * sample_rate / 2.0;
  double phase = 0.0;
  std::size_t cursor = 0;
  for (const Note& note : score) {
    const std::size_t n =
        static_cast<std::size_t>(std::llround(note.duration_s * sample_rate));
    if (note.hz > 0.0) {
      // Partial count: up to 20, bounded by Nyquist (with vibrato headroom).
      const double peak_hz = note.hz * cents_ratio(kVibratoDepthCents + 12.0 + 2.0);
      const int harmonics = std::max(
          1, std::min(20, static_cast<int>(std::floor(nyquist_cap / peak_hz))));
      double amps[20];
      double amp_sum = 0.0;
      for (int k = 0; k < harmonics; ++k) {
        amps[k] = formants.gain((k + 1) * note.hz) / static_cast<double>(k + 1);
        amp_sum += amps[k];
      }
      const double gain = amp_sum > 0.0 ? 1.0 / amp_sum : 0.0;

      for (std::size_t i = 0; i < n; ++i) {
        const double t_global = static_cast<double>(cursor + i) / sample_rate;
        const double t_note = static_cast<double>(i) / sample_rate;
        const double vib = kVibratoDepthCents *
                           std::sin(2.0 * M_PI * kVibratoRateHz * t_global + vib_phase);
        const double f_inst = note.hz * cents_ratio(detune_cents + vib);
        phase += 2.0 * M_PI * f_inst / sample_rate;

        double env = 1.0;
        if (t_note < kAttackS)
          env *= 0.5 - 0.5 * std::cos(M_PI * t_note / kAttackS);
        const double remain = note.duration_s - t_note;
        if (remain < kReleaseS)
          env *= 0.5 - 0.5 * std::cos(M_PI * std::max(0.0, remain) / kReleaseS);
        env *= 1.0 + 0.12 * std::sin(2.0 * M_PI * lfo_rate * t_global + lfo_phase);

        double s = 0.0;
        for (int k = 0; k < harmonics; ++k)
          s += amps[k] * std::sin(static_cast<double>(k + 1) * phase);
        stem.audio.samples[cursor + i] = gain * env * s;

        if ((cursor + i) % dsp::kHop == 0)
          stem.f0.values[(cursor + i) / dsp::kHop] = f_inst;
      }
    }
    cursor += n;
  }

  peak_normalize(stem.audio, kStemPeak);
  return stem;
}

std::vector<QuartetMix> enumerate_quartets(const StemsByPart& stems) {
  for (VoicePart p : kParts)
    if (stems[static_cast<int>(p)].empty())
      throw ValueError(std::string("enumerate_quartets: no stems for part ") +
                       part_name(p));
  std::vector<QuartetMix> mixes;
  const auto& s = stems[0];
  const auto& a = stems[1];
  const auto& t = stems[2];
  const auto& b = stems[3];
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < t.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l) {
          QuartetMix m;
          m.stem_index = {i, j, k, l};
          m.piece_id = s[i].piece_id;
          m.mix_id = m.piece_id + "_q" + std::to_string(i) + std::to_string(j) +
                     std::to_string(k) + std::to_string(l);
          mixes.push_back(std::move(m));
        }
  return mixes;
}

void materialize(QuartetMix& mix, const StemsByPart& stems) {
  const Stem* parts[4];
  for (int p = 0; p < 4; ++p) {
    const auto& pool = stems[p];
    if (mix.stem_index[p] >= pool.size())
      throw ValueError("materialize: stem index out of range");
    parts[p] = &pool[mix.stem_index[p]];
  }
  const std::size_t n = parts[0]->audio.size();
  for (int p = 1; p < 4; ++p)
    if (parts[p]->audio.size() != n)
      throw ValueError("materialize: stem lengths differ in mix " + mix.mix_id);

  AudioClip sum;
  sum.sample_rate = parts[0]->audio.sample_rate;
  sum.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    sum.samples[i] = parts[0]->audio.samples[i] + parts[1]->audio.samples[i] +
                     parts[2]->audio.samples[i] + parts[3]->audio.samples[i];
  const double peak = sum.peak();
  mix.scale = peak > 0.0 ? kStemPeak / peak : 1.0;
  for (double& v : sum.samples) v *= mix.scale;
  mix.mixture = std::move(sum);
}

AudioClip scaled_reference(const Stem& stem, double scale) {
  AudioClip out = stem.audio;
  for (double& v : out.samples) v *= scale;
  return out;
}

namespace {

// Filename comparison with numeric runs compared as numbers, so
// "x_2.wav" < "x_10.wav".
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) &&
        std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      const long long na = std::stoll(a.substr(i, i2 - i));
      const long long nb = std::stoll(b.substr(j, j2 - j));
      if (na != nb) return na < nb;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<Stem> curate(std::vector<Stem> raw, double target_rate) {
  // Group snippets of the same piece/part/singer.
  std::map<std::string, std::vector<Stem>> groups;
  for (Stem& s : raw) {
    const std::string key = s.piece_id + "\x1f" + part_name(s.part) + "\x1f" +
                            s.singer_id;
    groups[key].push_back(std::move(s));
  }

  std::vector<Stem> out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const Stem& a, const Stem& b) {
      return natural_less(a.audio_path, b.audio_path);
    });
    Stem merged = std::move(members.front());
    merged.audio = resample(merged.audio, target_rate);
    for (std::size_t i = 1; i < members.size(); ++i) {
      AudioClip next = resample(members[i].audio, target_rate);
      merged.audio.samples.insert(merged.audio.samples.end(),
                                  next.samples.begin(), next.samples.end());
      merged.has_f0 = false;  // snippet tracks are not stitched
    }
    out.push_back(std::move(merged));
  }

  // Trim every piece to its shortest stem.
  std::map<std::string, std::size_t> min_len;
  for (const Stem& s : out) {
    auto it = min_len.find(s.piece_id);
    if (it == min_len.end() || s.audio.size() < it->second)
      min_len[s.piece_id] = s.audio.size();
  }
  for (Stem& s : out) {
    s.audio.samples.resize(min_len[s.piece_id]);
    if (s.has_f0) {
      const std::size_t frames =
          s.audio.size() == 0 ? 0 : (s.audio.size() + s.f0.hop - 1) / s.f0.hop;
      if (s.f0.values.size() > frames) s.f0.values.resize(frames);
    }
    peak_normalize(s.audio, kStemPeak);
  }

  std::sort(out.begin(), out.end(), [](const Stem& a, const Stem& b) {
    if (a.piece_id != b.piece_id) return a.piece_id < b.piece_id;
    if (a.part != b.part) return static_cast<int>(a.part) < static_cast<int>(b.part);
    return a.singer_id < b.singer_id;
  });
  return out;
}

UnisonMix make_unison_mix(const StemsByPart& stems) {
  std::size_t n = 0;
  for (VoicePart p : kParts) {
    const auto& pool = stems[static_cast<int>(p)];
    if (pool.size() < 2)
      throw ValueError(std::string("make_unison_mix: need >= 2 stems for part ") +
                       part_name(p));
    for (const Stem& s : pool) {
      if (n == 0) n = s.audio.size();
      if (s.audio.size() != n)
        throw ValueError("make_unison_mix: stem length mismatch");
      if (!s.has_f0)
        throw ValueError("make_unison_mix: stem without F0 track: " + s.audio_path);
    }
  }

  UnisonMix mix;
  mix.piece_id = stems[0].front().piece_id;
  AudioClip sum;
  sum.sample_rate = stems[0].front().audio.sample_rate;
  sum.samples.assign(n, 0.0);

  for (int p = 0; p < 4; ++p) {
    AudioClip group;
    group.sample_rate = sum.sample_rate;
    group.samples.assign(n, 0.0);
    for (const Stem& s : stems[p])
      for (std::size_t i = 0; i < n; ++i) group.samples[i] += s.audio.samples[i];
    for (std::size_t i = 0; i < n; ++i) sum.samples[i] += group.samples[i];
    mix.group_reference[p] = std::move(group);
  }

  const double peak = sum.peak();
  mix.scale = peak > 0.0 ? kStemPeak / peak : 1.0;
  for (double& v : sum.samples) v *= mix.scale;
  for (int p = 0; p < 4; ++p)
    for (double& v : mix.group_reference[p].samples) v *= mix.scale;
  mix.mixture = std::move(sum);

  // Frame-wise mean over the voiced singers of each part.
  for (int p = 0; p < 4; ++p) {
    const auto& pool = stems[p];
    pitch::F0Track mean;
    mean.hop = pool.front().f0.hop;
    mean.sample_rate = pool.front().f0.sample_rate;
    std::size_t frames = pool.front().f0.frames();
    for (const Stem& s : pool) frames = std::min(frames, s.f0.frames());
    mean.values.assign(frames, 0.0);
    for (std::size_t t = 0; t < frames; ++t) {
      double acc = 0.0;
      int voiced = 0;
      for (const Stem& s : pool) {
        if (s.f0.values[t] > 0.0) {
          acc += s.f0.values[t];
          ++voiced;
        }
      }
      mean.values[t] = voiced > 0 ? acc / voiced : 0.0;
    }
    mix.mean_f0[p] = std::move(mean);
  }
  return mix;
}

std::vector<MixRecord> read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest: " + path);
  std::vector<MixRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      MixRecord r;
      r.type = j.at("type").get<std::string>();
      r.mix_id = j.at("mix_id").get<std::string>();
      r.piece = j.at("piece").get<std::string>();
      r.split = j.at("split").get<std::string>();
      r.scale = j.at("scale").get<double>();
      for (VoicePart p : kParts) {
        const int idx = static_cast<int>(p);
        r.stem_paths[idx] =
            j.at("stems").at(part_name(p)).get<std::vector<std::string>>();
        r.singer_ids[idx] =
            j.at("singers").at(part_name(p)).get<std::vector<std::string>>();
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw SchemaError(path + ": line " + std::to_string(lineno) +
                        ": bad record: " + e.what());
    }
  }
  return records;
}

void write_manifest(const std::string& path, const std::vector<MixRecord>& records) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  for (const MixRecord& r : records) {
    json stems = json::object(), singers = json::object();
    for (VoicePart p : kParts) {
      stems[part_name(p)] = r.stem_paths[static_cast<int>(p)];
      singers[part_name(p)] = r.singer_ids[static_cast<int>(p)];
    }
    json j{{"type", r.type},   {"mix_id", r.mix_id},   {"piece", r.piece},
           {"split", r.split}, {"scale", r.scale},     {"stems", stems},
           {"singers", singers}};
    f << j.dump() << "\n";
  }
  if (!f) throw IoError("write failed: " + path);
}

SplitPlan build_split(const std::vector<MixRecord>& records) {
  SplitPlan plan;
  for (const MixRecord& r : records) {
    if (r.split == "train") plan.train.push_back(r);
    else if (r.split == "test1") plan.test_case1.push_back(r);
    else if (r.split == "test2") plan.test_case2.push_back(r);
  }
  return plan;
}

std::vector<std::string> split_leakage(const SplitPlan& plan) {
  auto pairs = [](const std::vector<MixRecord>& records) {
    std::set<std::string> out;
    for (const MixRecord& r : records)
      for (int p = 0; p < 4; ++p)
        for (const std::string& singer : r.singer_ids[p])
          out.insert(r.piece + "/" + singer);
    return out;
  };
  const std::set<std::string> train = pairs(plan.train);
  const std::set<std::string> test1 = pairs(plan.test_case1);
  std::vector<std::string> leaked;
  std::set_intersection(train.begin(), train.end(), test1.begin(), test1.end(),
                        std::back_inserter(leaked));
  return leaked;
}

std::array<Score, 4> generate_scores(std::uint64_t seed, double duration_s) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&rng](std::initializer_list<int> xs) {
    std::vector<int> v(xs);
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  std::array<Score, 4> scores;
  double t = 0.0;
  int bass_midi = 48;
  bool first = true;
  while (t < duration_s - 1e-9) {
    double dur = uniform(1.2, 2.4);
    if (t + dur > duration_s) dur = duration_s - t;
    if (dur < 0.25) {
      // Too short to bother with a fresh chord; extend the last one.
      for (auto& score : scores)
        if (!score.empty()) score.back().duration_s += dur;
      break;
    }

    if (!first) bass_midi += pick({-4, -3, -2, -1, 1, 2, 3, 4});
    first = false;
    bass_midi = std::clamp(bass_midi, 44, 58);
    // Close voicing: tenor near the top of its range, alto right above it,
    // so the two overlap the way real SATB writing does.
    const int tenor_midi = std::clamp(bass_midi + pick({7, 9, 12}), 50, 68);
    const int alto_midi = std::clamp(tenor_midi + pick({1, 3, 4, 5}), 55, 75);
    const int soprano_midi = std::clamp(alto_midi + pick({4, 5, 7, 9}), 61, 80);

    const int midis[4] = {soprano_midi, alto_midi, tenor_midi, bass_midi};
    for (int p = 0; p < 4; ++p) {
      const bool rest = uniform(0.0, 1.0) < 0.06;
      scores[p].push_back({rest ? 0.0 : midi_to_hz(midis[p]), dur});
    }
    t += dur;
  }
  return scores;
}

std::vector<MixRecord> build_synthetic_corpus(const SynthCorpusParams& params) {
  if (params.pieces == 0 || params.singers_per_part == 0)
    throw ValueError("build_synthetic_corpus: pieces and singers must be >= 1");
  std::error_code ec;
  fs::create_directories(params.root, ec);
  if (ec) throw IoError("cannot create corpus root " + params.root + ": " + ec.message());

  const bool have_holdout_piece = params.pieces >= 2;
  const bool have_holdout_singer =
      params.holdout_singers && params.singers_per_part >= 2;
  const std::size_t holdout_piece = params.pieces - 1;
  const std::size_t holdout_singer = params.singers_per_part - 1;

  std::vector<MixRecord> records;
  for (std::size_t piece = 0; piece < params.pieces; ++piece) {
    char piece_id[16];
    std::snprintf(piece_id, sizeof(piece_id), "p%02zu", piece);
    const fs::path piece_dir = fs::path(params.root) / piece_id;
    fs::create_directories(piece_dir, ec);
    if (ec) throw IoError("cannot create " + piece_dir.string() + ": " + ec.message());

    const auto scores =
        generate_scores(hash_combine(params.seed, 0x5C0 + piece),
                        params.piece_duration_s);

    StemsByPart stems;
    for (VoicePart part : kParts) {
      const int pi = static_cast<int>(part);
      for (std::size_t singer = 0; singer < params.singers_per_part; ++singer) {
        const std::uint64_t stem_seed = hash_combine(
            hash_combine(hash_combine(params.seed, piece), static_cast<std::uint64_t>(pi)),
            singer);
        Stem stem = synthesize_stem(part, scores[pi], params.sample_rate, stem_seed);
        stem.piece_id = piece_id;
        stem.singer_id = "s" + std::to_string(singer);
        const std::string base =
            std::string(part_name(part)) + "_" + stem.singer_id;
        stem.audio_path = std::string(piece_id) + "/" + base + ".wav";
        write_wav((piece_dir / (base + ".wav")).string(), stem.audio);
        pitch::save_f0_csv((piece_dir / (base + ".f0.csv")).string(), stem.f0);
        stems[pi].push_back(std::move(stem));
      }
    }

    std::vector<QuartetMix> quartets = enumerate_quartets(stems);
    for (QuartetMix& q : quartets) {
      materialize(q, stems);
      MixRecord r;
      r.type = "quartet";
      r.mix_id = q.mix_id;
      r.piece = piece_id;
      r.scale = q.scale;
      bool all_holdout = true, any_holdout = false;
      for (int p = 0; p < 4; ++p) {
        const Stem& s = stems[p][q.stem_index[p]];
        r.stem_paths[p] = {s.audio_path};
        r.singer_ids[p] = {s.singer_id};
        const bool held = have_holdout_singer && q.stem_index[p] == holdout_singer;
        all_holdout &= held;
        any_holdout |= held;
      }
      if (have_holdout_singer) {
        if (all_holdout) r.split = "test1";
        else if (any_holdout) r.split = "held";
        else r.split = (have_holdout_piece && piece == holdout_piece) ? "held" : "train";
      } else {
        r.split = (have_holdout_piece && piece == holdout_piece) ? "test1" : "train";
      }
      records.push_back(std::move(r));
    }

    if (params.singers_per_part >= 2) {
      const UnisonMix unison = make_unison_mix(stems);
      MixRecord r;
      r.type = "unison";
      r.mix_id = std::string(piece_id) + "_unison";
      r.piece = piece_id;
      r.split = "test2";
      r.scale = unison.scale;
      for (int p = 0; p < 4; ++p)
        for (const Stem& s : stems[p]) {
          r.stem_paths[p].push_back(s.audio_path);
          r.singer_ids[p].push_back(s.singer_id);
        }
      records.push_back(std::move(r));
    }
  }

  write_manifest((fs::path(params.root) / "manifest.jsonl").string(), records);
  return records;
}

std::vector<Stem> ingest_directory(const std::string& root) {
  if (!fs::exists(root)) throw IoError("ingest: no such directory: " + root);
  std::vector<fs::path> wavs;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") wavs.push_back(entry.path());
  }
  std::sort(wavs.begin(), wavs.end());

  std::vector<Stem> stems;
  for (const fs::path& p : wavs) {
    std::string base = p.stem().string();
    std::transform(base.begin(), base.end(), base.begin(), ::tolower);

    VoicePart part{};
    std::size_t tok_pos = std::string::npos, tok_len = 0;
    for (VoicePart candidate : kParts) {
      const std::size_t pos = base.find(part_name(candidate));
      if (pos != std::string::npos && pos < tok_pos) {
        tok_pos = pos;
        tok_len = std::string(part_name(candidate)).size();
        part = candidate;
      }
    }
    if (tok_pos == std::string::npos) {
      std::fprintf(stderr, "[corpus] skipping %s: no part token in filename\n",
                   p.string().c_str());
      continue;
    }

    // First number after the part token names the singer; later numbers
    // are snippet indices handled by curate() through filename order.
    std::string singer = "0";
    for (std::size_t i = tok_pos + tok_len; i < base.size(); ++i) {
      if (std::isdigit(static_cast<unsigned char>(base[i]))) {
        std::size_t j = i;
        while (j < base.size() && std::isdigit(static_cast<unsigned char>(base[j]))) ++j;
        singer = base.substr(i, j - i);
        break;
      }
    }

    const fs::path parent = fs::relative(p.parent_path(), root);
    std::string piece = parent.string();
    if (piece.empty() || piece == ".") {
      // No piece directory: use the filename up to the part token.
      piece = base.substr(0, tok_pos);
      while (!piece.empty() && !std::isalnum(static_cast<unsigned char>(piece.back())))
        piece.pop_back();
      if (piece.empty()) piece = "piece";
    }

    WavData wav = read_wav(p.string());
    if (wav.channels.size() > 1)
      std::fprintf(stderr, "[corpus] %s: %zu channels -> mono by channel mean\n",
                   p.string().c_str(), wav.channels.size());
    Stem stem;
    stem.part = part;
    stem.singer_id = singer;
    stem.piece_id = piece;
    stem.audio = to_mono(wav);
    stem.has_f0 = false;
    stem.audio_path = p.string();
    stems.push_back(std::move(stem));
  }
  return stems;
}

}  // namespace satbsep::corpus
