// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// SATB corpus handling: synthetic stems with known ground-truth F0,
// ingestion of recorded stem datasets, curation, combinatorial quartet
// mixing, unison mixes, and train/test splits.

#ifndef SATBSEP_CORPUS_HPP_
#define SATBSEP_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "satbsep/audio.hpp"
#include "satbsep/pitch.hpp"

namespace satbsep::corpus {

enum class VoicePart : int { soprano = 0, alto = 1, tenor = 2, bass = 3 };

inline constexpr std::array<VoicePart, 4> kParts = {
    VoicePart::soprano, VoicePart::alto, VoicePart::tenor, VoicePart::bass};

struct PartRange {
  double f0_min;
  double f0_max;
};

// Soprano 260-880, Alto 190-660, Tenor 145-440, Bass 90-290 Hz.
PartRange part_range(VoicePart part);
const char* part_name(VoicePart part);
VoicePart part_from_name(const std::string& name);

// One note of a score; hz == 0 encodes a rest.
struct Note {
  double hz;
  double duration_s;
};
using Score = std::vector<Note>;

struct Stem {
  VoicePart part{};
  std::string singer_id;
  std::string piece_id;
  AudioClip audio;
  pitch::F0Track f0;
  bool has_f0 = false;
  std::string audio_path;  // provenance; snippet concatenation orders by this
};

// Harmonic additive voice: >= 10 partials with 1/k rolloff shaped by a
// fixed 3-resonance formant filter, 5 Hz / +-20 cent vibrato, a slow
// amplitude envelope, and per-seed detune and timbre. The returned f0
// track holds the exact synthesized contour (vibrato included).
Stem synthesize_stem(VoicePart part, const Score& score, double sample_rate,
                     std::uint64_t seed);

using StemsByPart = std::array<std::vector<Stem>, 4>;

struct QuartetMix {
  std::array<std::size_t, 4> stem_index{};  // indexes into a StemsByPart
  std::string mix_id;
  std::string piece_id;
  AudioClip mixture;  // filled by materialize()
  double scale = 0.0;
};

// Full cartesian product: exactly one singer per part per mix.
std::vector<QuartetMix> enumerate_quartets(const StemsByPart& stems);

// mixture = shared_scale * (sum of the four stems), peak 0.95.
void materialize(QuartetMix& mix, const StemsByPart& stems);

// The stem as it appears inside a mixture (scaled copy).
AudioClip scaled_reference(const Stem& stem, double scale);

// Normalizes sample rate and peak (0.95), trims same-piece stems to the
// shortest, and concatenates snippet files (same piece/part/singer) in
// natural filename order into full-length stems.
std::vector<Stem> curate(std::vector<Stem> raw, double target_rate);

struct UnisonMix {
  std::string piece_id;
  AudioClip mixture;
  double scale = 0.0;
  std::array<pitch::F0Track, 4> mean_f0;       // frame-wise mean over voiced singers
  std::array<AudioClip, 4> group_reference;    // scale * per-part stem sum
};

// Requires >= 2 equal-length stems per part.
UnisonMix make_unison_mix(const StemsByPart& stems);

// One mix per manifest line. Paths are relative to the corpus root.
struct MixRecord {
  std::string type;  // "quartet" | "unison"
  std::string mix_id;
  std::string piece;
  std::string split;  // train | test1 | test2 | held
  double scale = 0.0;
  std::array<std::vector<std::string>, 4> stem_paths;
  std::array<std::vector<std::string>, 4> singer_ids;
};

std::vector<MixRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<MixRecord>& records);

struct SplitPlan {
  std::vector<MixRecord> train;
  std::vector<MixRecord> test_case1;
  std::vector<MixRecord> test_case2;
};

SplitPlan build_split(const std::vector<MixRecord>& records);

// (piece, singer) pairs shared between train and test_case1; empty means
// no leakage.
std::vector<std::string> split_leakage(const SplitPlan& plan);

struct SynthCorpusParams {
  std::string root;
  std::size_t pieces = 1;
  std::size_t singers_per_part = 1;
  double piece_duration_s = 10.0;
  double sample_rate = 22050.0;
  std::uint64_t seed = 1;
  // CSD-style protocol: hold out the last singer of every part (and the
  // last piece) for test case 1. With false only the last piece is held
  // out, all singers train.
  bool holdout_singers = true;
};

// Writes stems + F0 CSVs + manifest under params.root; returns the
// manifest records. Deterministic per seed.
std::vector<MixRecord> build_synthetic_corpus(const SynthCorpusParams& params);

// CSD-style ingestion: recursively scans for WAV files, infers piece from
// the directory, part from a soprano/alto/tenor/bass filename token and
// singer/snippet from trailing numbers. Returns uncurated stems.
std::vector<Stem> ingest_directory(const std::string& root);

// Homophonic chord-progression scores for the four parts (equal total
// duration, shared note boundaries). Exposed for tests.
std::array<Score, 4> generate_scores(std::uint64_t seed, double duration_s);

}  // namespace satbsep::corpus

#endif  // SATBSEP_CORPUS_HPP_
