#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "satbsep/corpus.hpp"

using namespace satbsep;
using namespace satbsep::corpus;

namespace {

namespace fs = std::filesystem;

double cents(double a, double b) { return 1200.0 * std::log2(a / b); }

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Stem quick_stem(VoicePart part, double hz, double dur, std::uint64_t seed,
                const std::string& piece = "p", const std::string& singer = "s0") {
  Stem s = synthesize_stem(part, {{hz, dur}}, 22050.0, seed);
  s.piece_id = piece;
  s.singer_id = singer;
  return s;
}

StemsByPart quartet_pool(std::size_t singers, double dur = 1.0) {
  StemsByPart pool;
  const double notes[4] = {440.0, 330.0, 220.0, 110.0};
  for (int p = 0; p < 4; ++p)
    for (std::size_t s = 0; s < singers; ++s)
      pool[p].push_back(quick_stem(static_cast<VoicePart>(p), notes[p], dur,
                                   100 + p * 10 + s, "p",
                                   "s" + std::to_string(s)));
  return pool;
}

}  // namespace

TEST_CASE("part ranges match the SATB convention") {
  CHECK(part_range(VoicePart::soprano).f0_min == 260.0);
  CHECK(part_range(VoicePart::soprano).f0_max == 880.0);
  CHECK(part_range(VoicePart::alto).f0_min == 190.0);
  CHECK(part_range(VoicePart::alto).f0_max == 660.0);
  CHECK(part_range(VoicePart::tenor).f0_min == 145.0);
  CHECK(part_range(VoicePart::tenor).f0_max == 440.0);
  CHECK(part_range(VoicePart::bass).f0_min == 90.0);
  CHECK(part_range(VoicePart::bass).f0_max == 290.0);
}

TEST_CASE("synthesize_stem: bass at 110 Hz has ~110 Hz ground truth") {
  const Stem stem = quick_stem(VoicePart::bass, 110.0, 1.0, 7);
  CHECK(stem.audio.sample_rate == 22050.0);
  CHECK(stem.audio.size() == 22050);
  CHECK(stem.has_f0);
  std::size_t voiced = 0;
  for (double f : stem.f0.values) {
    if (f <= 0) continue;
    ++voiced;
    CHECK(std::fabs(cents(f, 110.0)) <= 20.0 + 12.0 + 1e-6);  // vibrato + detune
  }
  CHECK(voiced == stem.f0.frames());
  CHECK(stem.audio.peak() == doctest::Approx(0.95));
}

TEST_CASE("synthesize_stem: rest gives silence and zero f0") {
  const Stem stem = synthesize_stem(VoicePart::soprano, {{0.0, 0.5}}, 22050.0, 7);
  CHECK(stem.audio.size() == 11025);
  for (double s : stem.audio.samples) CHECK(s == 0.0);
  for (double f : stem.f0.values) CHECK(f == 0.0);
}

TEST_CASE("synthesize_stem rejects out-of-range notes, naming the part") {
  try {
    synthesize_stem(VoicePart::tenor, {{500.0, 1.0}}, 22050.0, 1);
    FAIL("expected ValueError");
  } catch (const ValueError& e) {
    CHECK(std::string(e.what()).find("tenor") != std::string::npos);
  }
}

TEST_CASE("synthesize_stem is deterministic per seed") {
  const Stem a = quick_stem(VoicePart::alto, 330.0, 0.7, 42);
  const Stem b = quick_stem(VoicePart::alto, 330.0, 0.7, 42);
  const Stem c = quick_stem(VoicePart::alto, 330.0, 0.7, 43);
  CHECK(a.audio.samples == b.audio.samples);
  CHECK(a.audio.samples != c.audio.samples);
}

TEST_CASE("synthesized spectrum has at least 10 partials") {
  // Coarse check: energy above 8x the fundamental for a soprano note.
  const Stem stem = quick_stem(VoicePart::soprano, 600.0, 1.0, 3);
  double lo = 0, hi = 0;
  const std::size_t n = stem.audio.size();
  for (std::size_t i = 0; i < n; ++i) {
    (void)i;
  }
  // count zero crossings of the 10th-harmonic band via simple goertzel-like
  // correlation at k*f0 for k = 1..10
  for (int k = 1; k <= 10; ++k) {
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = 2.0 * M_PI * 600.0 * k * i / 22050.0;
      re += stem.audio.samples[i] * std::cos(ph);
      im += stem.audio.samples[i] * std::sin(ph);
    }
    const double mag = std::hypot(re, im) / n;
    if (k == 1) lo = mag;
    if (k == 10) hi = mag;
    CHECK(mag > 1e-5);  // partial present
  }
  CHECK(lo > hi);  // rolloff
}

TEST_CASE("enumerate_quartets counts: 1, 16, 256") {
  CHECK(enumerate_quartets(quartet_pool(1)).size() == 1);
  CHECK(enumerate_quartets(quartet_pool(2)).size() == 16);
  CHECK(enumerate_quartets(quartet_pool(4)).size() == 256);
}

TEST_CASE("enumerate_quartets equals brute force for uneven pools") {
  StemsByPart pool = quartet_pool(3);
  pool[2].pop_back();  // 3,3,2,3
  CHECK(enumerate_quartets(pool).size() == 3 * 3 * 2 * 3);
}

TEST_CASE("enumerate_quartets rejects an empty part") {
  StemsByPart pool = quartet_pool(1);
  pool[1].clear();
  CHECK_THROWS_AS(enumerate_quartets(pool), ValueError);
}

TEST_CASE("materialized mixture is the shared-scaled stem sum, exactly") {
  StemsByPart pool = quartet_pool(2);
  auto mixes = enumerate_quartets(pool);
  materialize(mixes[5], pool);
  const QuartetMix& m = mixes[5];
  CHECK(m.mixture.peak() == doctest::Approx(0.95));
  for (std::size_t i = 0; i < m.mixture.size(); ++i) {
    const double expect = m.scale * (pool[0][m.stem_index[0]].audio.samples[i] +
                                     pool[1][m.stem_index[1]].audio.samples[i] +
                                     pool[2][m.stem_index[2]].audio.samples[i] +
                                     pool[3][m.stem_index[3]].audio.samples[i]);
    CHECK(m.mixture.samples[i] == expect);  // bit-exact by construction
  }
}

TEST_CASE("curate normalizes rate, length and peak") {
  std::vector<Stem> raw;
  Stem a = quick_stem(VoicePart::soprano, 440.0, 1.0, 1, "x", "s0");
  a.audio = resample(a.audio, 44100.0);  // pretend it arrived at 44.1k
  a.audio_path = "x/soprano_0.wav";
  Stem b = quick_stem(VoicePart::bass, 110.0, 1.2, 2, "x", "s0");
  b.audio_path = "x/bass_0.wav";
  for (double& s : b.audio.samples) s *= 0.2 / 0.95;  // peak 0.2
  raw.push_back(a);
  raw.push_back(b);

  const auto curated = curate(raw, 22050.0);
  REQUIRE(curated.size() == 2);
  CHECK(curated[0].audio.sample_rate == 22050.0);
  CHECK(curated[1].audio.sample_rate == 22050.0);
  CHECK(curated[0].audio.size() == curated[1].audio.size());
  CHECK(curated[0].audio.peak() == doctest::Approx(0.95));
  CHECK(curated[1].audio.peak() == doctest::Approx(0.95));
}

TEST_CASE("curate concatenates snippets in natural filename order") {
  std::vector<Stem> raw;
  for (int i : {2, 10, 1}) {  // shuffled on purpose; 10 after 2 naturally
    Stem s = quick_stem(VoicePart::tenor, 200.0, 1.0, 40 + i, "y", "s1");
    s.audio_path = "y/tenor_1_" + std::to_string(i) + ".wav";
    raw.push_back(s);
  }
  const auto curated = curate(raw, 22050.0);
  REQUIRE(curated.size() == 1);
  CHECK(curated[0].audio.size() == 3 * 22050);
  // first snippet (index 1, seed 41) must open the concatenation
  Stem first = quick_stem(VoicePart::tenor, 200.0, 1.0, 41, "y", "s1");
  double gain = 0.95 / 0.95;
  (void)gain;
  // compare shape of the first chunk up to the common rescale
  const double ref0 = first.audio.samples[1000];
  const double got0 = curated[0].audio.samples[1000];
  CHECK(std::fabs(ref0) > 1e-6);
  CHECK(got0 / ref0 == doctest::Approx(curated[0].audio.peak() / 0.95).epsilon(0.2));
}

TEST_CASE("make_unison_mix: mean F0 and group math") {
  StemsByPart pool = quartet_pool(4, 1.0);
  const UnisonMix mix = make_unison_mix(pool);
  CHECK(mix.mixture.peak() == doctest::Approx(0.95));
  for (int p = 0; p < 4; ++p) {
    CHECK(mix.mean_f0[p].frames() > 0);
    // every frame voiced here: mean must sit inside the singers' spread
    for (std::size_t t = 0; t < mix.mean_f0[p].frames(); ++t) {
      double lo = 1e9, hi = 0;
      for (const Stem& s : pool[p]) {
        lo = std::min(lo, s.f0.values[t]);
        hi = std::max(hi, s.f0.values[t]);
      }
      CHECK(mix.mean_f0[p].values[t] >= lo - 1e-9);
      CHECK(mix.mean_f0[p].values[t] <= hi + 1e-9);
    }
  }
  // mixture equals sum of group references
  for (std::size_t i = 0; i < mix.mixture.size(); ++i) {
    const double total = mix.group_reference[0].samples[i] +
                         mix.group_reference[1].samples[i] +
                         mix.group_reference[2].samples[i] +
                         mix.group_reference[3].samples[i];
    CHECK(mix.mixture.samples[i] == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("make_unison_mix: two identical stems keep the stem F0") {
  StemsByPart pool;
  for (int p = 0; p < 4; ++p) {
    const double notes[4] = {440.0, 330.0, 220.0, 110.0};
    Stem s = quick_stem(static_cast<VoicePart>(p), notes[p], 0.6, 900 + p);
    pool[p].push_back(s);
    pool[p].push_back(s);
  }
  const UnisonMix mix = make_unison_mix(pool);
  for (std::size_t t = 0; t < mix.mean_f0[0].frames(); ++t)
    CHECK(mix.mean_f0[0].values[t] == doctest::Approx(pool[0][0].f0.values[t]));
}

TEST_CASE("make_unison_mix: arithmetic mean of voiced singers") {
  StemsByPart pool = quartet_pool(2, 0.6);
  // overwrite f0 tracks with controlled values
  for (int p = 0; p < 4; ++p) {
    pool[p][0].f0.values.assign(20, 200.0);
    pool[p][1].f0.values.assign(20, 210.0);
  }
  const UnisonMix mix = make_unison_mix(pool);
  CHECK(mix.mean_f0[2].values[10] == doctest::Approx(205.0));
  // one singer unvoiced -> mean is the other singer
  pool[0][0].f0.values[5] = 0.0;
  const UnisonMix mix2 = make_unison_mix(pool);
  CHECK(mix2.mean_f0[0].values[5] == doctest::Approx(210.0));
}

TEST_CASE("make_unison_mix rejects single-singer parts and length mismatch") {
  StemsByPart single = quartet_pool(1);
  CHECK_THROWS_AS(make_unison_mix(single), ValueError);
  StemsByPart pool = quartet_pool(2);
  pool[3][1].audio.samples.resize(100);
  CHECK_THROWS_AS(make_unison_mix(pool), ValueError);
}

TEST_CASE("synthetic corpus: files, manifest, splits, determinism") {
  const fs::path root = temp_dir("satbsep_corpus_a");
  SynthCorpusParams params;
  params.root = root.string();
  params.pieces = 2;
  params.singers_per_part = 2;
  params.piece_duration_s = 2.0;
  params.seed = 5;
  const auto records = build_synthetic_corpus(params);

  // 2 pieces x 16 quartets + 2 unison rows
  std::size_t quartets = 0, unisons = 0;
  for (const auto& r : records) {
    if (r.type == "quartet") ++quartets;
    if (r.type == "unison") ++unisons;
  }
  CHECK(quartets == 32);
  CHECK(unisons == 2);

  // stems on disk: 2 pieces x 4 parts x 2 singers
  std::size_t wavs = 0;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.path().extension() == ".wav") ++wavs;
  CHECK(wavs == 16);

  // manifest round trip
  const auto back = read_manifest((root / "manifest.jsonl").string());
  CHECK(back.size() == records.size());
  CHECK(back[3].mix_id == records[3].mix_id);
  CHECK(back[3].scale == doctest::Approx(records[3].scale));

  // split: no leakage
  const SplitPlan plan = build_split(records);
  CHECK(!plan.train.empty());
  CHECK(!plan.test_case1.empty());
  CHECK(!plan.test_case2.empty());
  CHECK(split_leakage(plan).empty());

  // deterministic rebuild: stems byte-identical
  const fs::path root_b = temp_dir("satbsep_corpus_b");
  SynthCorpusParams params_b = params;
  params_b.root = root_b.string();
  build_synthetic_corpus(params_b);
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root);
    std::ifstream fa(e.path(), std::ios::binary);
    std::ifstream fb(root_b / rel, std::ios::binary);
    REQUIRE(fb.good());
    const std::string da((std::istreambuf_iterator<char>(fa)), {});
    const std::string db((std::istreambuf_iterator<char>(fb)), {});
    CHECK(da == db);
  }
}

TEST_CASE("split: held-out singers never train, all-holdout quartet tests") {
  const fs::path root = temp_dir("satbsep_corpus_c");
  SynthCorpusParams params;
  params.root = root.string();
  params.pieces = 2;
  params.singers_per_part = 2;
  params.piece_duration_s = 1.5;
  params.seed = 6;
  params.holdout_singers = true;
  const auto records = build_synthetic_corpus(params);
  for (const auto& r : records) {
    if (r.type != "quartet") continue;
    bool any_heldout = false, all_heldout = true;
    for (int p = 0; p < 4; ++p) {
      const bool h = r.singer_ids[p][0] == "s1";
      any_heldout |= h;
      all_heldout &= h;
    }
    if (r.split == "train") {
      CHECK_FALSE(any_heldout);
      CHECK(r.piece != "p01");  // holdout piece
    }
    if (all_heldout) CHECK(r.split == "test1");
  }
}

TEST_CASE("split without singer holdout: held-out piece is the test") {
  const fs::path root = temp_dir("satbsep_corpus_d");
  SynthCorpusParams params;
  params.root = root.string();
  params.pieces = 3;
  params.singers_per_part = 2;
  params.piece_duration_s = 1.5;
  params.seed = 7;
  params.holdout_singers = false;
  const auto records = build_synthetic_corpus(params);
  const SplitPlan plan = build_split(records);
  CHECK(plan.train.size() == 32);       // 2 pieces x 16
  CHECK(plan.test_case1.size() == 16);  // holdout piece
  for (const auto& r : plan.test_case1) CHECK(r.piece == "p02");
  CHECK(split_leakage(plan).empty());
}

TEST_CASE("ingest_directory infers piece, part, singer from CSD-style names") {
  const fs::path root = temp_dir("satbsep_ingest");
  fs::create_directories(root / "locus");
  const double notes[4] = {440.0, 330.0, 220.0, 110.0};
  for (int p = 0; p < 4; ++p)
    for (int s = 1; s <= 2; ++s) {
      const Stem stem = quick_stem(static_cast<VoicePart>(p), notes[p], 0.5,
                                   p * 10 + s);
      write_wav((root / "locus" /
                 ("CSD_LI_" + std::string(part_name(static_cast<VoicePart>(p))) +
                  "_" + std::to_string(s) + ".wav"))
                    .string(),
                stem.audio);
    }
  auto stems = ingest_directory(root.string());
  CHECK(stems.size() == 8);
  for (const auto& s : stems) {
    CHECK(s.piece_id == "locus");
    CHECK((s.singer_id == "1" || s.singer_id == "2"));
  }
  const auto curated = curate(std::move(stems), 22050.0);
  CHECK(curated.size() == 8);
  for (const auto& s : curated) CHECK(s.audio.sample_rate == 22050.0);
}

TEST_CASE("single-piece single-singer corpus trains everything") {
  const fs::path root = temp_dir("satbsep_corpus_e");
  SynthCorpusParams params;
  params.root = root.string();
  params.pieces = 1;
  params.singers_per_part = 1;
  params.piece_duration_s = 1.0;
  params.seed = 8;
  const auto records = build_synthetic_corpus(params);
  CHECK(records.size() == 1);
  CHECK(records[0].split == "train");
}
