// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "doctest_torch.h"

#include <set>

#include "test_support.h"
#include "tle/data/builder.h"
#include "tle/data/corpus.h"
#include "tle/data/manifest.h"
#include "tle/data/mixture.h"
#include "tle/data/spec.h"
#include "tle/data/toy_corpus.h"
#include "tle/dsp/loudness.h"
#include "tle/dsp/wav_io.h"
#include "tle/util/error.h"

namespace d = tle::data;
namespace dsp = tle::dsp;
namespace tt = tle::testing;

namespace {

// One synthetic corpus shared by the suite.
struct SharedCorpus {
  tt::TempDir dir{"corpus"};
  std::vector<d::CorpusEntry> entries;
  SharedCorpus() {
    d::ToyCorpusSpec spec;
    spec.utterances_per_language = 24;
    spec.speakers_per_language = 12;
    spec.min_duration_s = 6.5;
    spec.max_duration_s = 9.0;
    entries = d::SynthesizeToyCorpus(spec, dir.path());
  }
};

const SharedCorpus& Corpus() {
  static SharedCorpus c;
  return c;
}

d::DatasetSpec SmallSpec() {
  d::DatasetSpec s;
  s.counts = {10, 3, 3};
  s.seed = 17;
  return s;
}

const d::CorpusEntry& First(const std::string& lang, int skip = 0) {
  for (const auto& e : Corpus().entries) {
    if (e.language == lang && e.duration >= 7.0 && skip-- == 0) return e;
  }
  throw std::runtime_error("no entry");
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("split names") {
    for (d::Split s : d::kAllSplits) CHECK(d::ParseSplit(d::SplitName(s)) == s);
    CHECK_THROWS_AS(d::ParseSplit("validation"), tle::Error);
  }

  TEST_CASE("dataset spec validation and json") {
    d::DatasetSpec s = SmallSpec();
    const auto back = d::DatasetSpec::FromJson(s.ToJson());
    CHECK(back.counts == s.counts);
    CHECK(back.seed == s.seed);
    CHECK(back.languages == s.languages);
    s.languages = {"en", "en"};
    CHECK_THROWS_AS(s.Validate(), tle::Error);
    s = SmallSpec();
    s.counts[1] = 0;
    CHECK_THROWS_AS(s.Validate(), tle::Error);
    s = SmallSpec();
    s.lufs_min = -20;
    CHECK_THROWS_AS(s.Validate(), tle::Error);
    auto j = SmallSpec().ToJson();
    j["typo"] = true;
    CHECK_THROWS_AS(d::DatasetSpec::FromJson(j), tle::Error);
  }

  TEST_CASE("corpus tsv round trip and filtering") {
    tt::TempDir dir("tsv");
    std::vector<d::CorpusEntry> v = {{"a.wav", "s1", 8.5, "en"}, {"b.wav", "s2", 3.0, "en"}, {"c.wav", "s3", 7.0, "de"}};
    d::WriteCorpusTsv(dir / "c.tsv", v);
    const auto back = d::ReadCorpusTsv(dir / "c.tsv");
    REQUIRE(back.size() == 3);
    CHECK(back[0].path == (dir / "a.wav").string());
    CHECK(back[2].speaker_id == "s3");
    CHECK(back[1].duration == 3.0);
    const auto kept = d::FilterCorpus(back, 7.0);
    CHECK(kept.size() == 2);
    for (const auto& e : kept) CHECK(e.duration >= 7.0);
    CHECK_THROWS_WITH_AS(d::FilterCorpus({v[1]}, 7.0), doctest::Contains("en"), tle::Error);
  }

  TEST_CASE("speaker splits are disjoint and cover both languages") {
    const auto spec = SmallSpec();
    const auto a = d::AssignSplits(Corpus().entries, spec);
    std::array<std::set<std::string>, 3> spk;
    for (d::Split s : d::kAllSplits) {
      std::set<std::string> langs;
      for (const auto& e : a.of(s)) {
        spk[static_cast<int>(s)].insert(e.speaker_id);
        langs.insert(e.language);
        CHECK(a.speaker_split.at(e.speaker_id) == s);
      }
      CHECK(langs.size() == 2);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        for (const auto& s : spk[i]) CHECK(spk[j].count(s) == 0);
      }
    }
    const auto b = d::AssignSplits(Corpus().entries, spec);
    CHECK((a.speaker_split == b.speaker_split));
    std::vector<d::CorpusEntry> two = {{"a", "s1", 8, "en"}, {"b", "s2", 8, "de"}};
    CHECK_THROWS_AS(d::AssignSplits(two, spec), tle::Error);
  }

  TEST_CASE("pair and mix") {
    const auto spec = SmallSpec();
    const auto& a = First("en");
    const auto& b = First("de");
    const auto wa = dsp::ReadWav(a.path), wb = dsp::ReadWav(b.path);
    const auto m = d::PairAndMix(a, wa, b, wb, spec, 99);
    REQUIRE(m.sources.size() == 2);
    CHECK(m.mixture.sample_rate == dsp::kModelRate);
    const std::size_t len = std::max(m.info[0].num_samples, m.info[1].num_samples);
    CHECK(m.mixture.size() == len);
    double worst = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
      worst = std::max(worst, std::abs(m.mixture.samples[n] - m.sources[0].samples[n] - m.sources[1].samples[n]));
    }
    CHECK(worst < 1e-12);
    CHECK(dsp::PeakAbs(m.mixture.samples) <= spec.peak_limit + 1e-12);
    for (int i = 0; i < 2; ++i) {
      CHECK(m.info[i].lufs >= spec.lufs_min);
      CHECK(m.info[i].lufs <= spec.lufs_max);
      const double measured = dsp::IntegratedLoudness(m.sources[i]);
      CHECK(measured <= m.info[i].lufs + 0.5);
    }
    CHECK(&m.source("de") == &m.sources[1]);
    const auto again = d::PairAndMix(a, wa, b, wb, spec, 99);
    CHECK(again.mixture.samples == m.mixture.samples);
    CHECK_THROWS_AS(d::PairAndMix(a, wa, First("en", 1), wa, spec, 1), tle::Error);
    d::CorpusEntry same = b;
    same.speaker_id = a.speaker_id;
    CHECK_THROWS_AS(d::PairAndMix(a, wa, same, wb, spec, 1), tle::Error);
  }

  TEST_CASE("loudness targets hold when no peak limiting occurs") {
    d::DatasetSpec spec = SmallSpec();
    spec.peak_limit = 1.0;
    const auto& a = First("en", 2);
    const auto& b = First("de", 2);
    const auto m = d::PairAndMix(a, dsp::ReadWav(a.path), b, dsp::ReadWav(b.path), spec, 3);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(dsp::IntegratedLoudness(m.sources[i]) - m.info[i].lufs) <= 0.5);
  }

  TEST_CASE("train crops are exact and active") {
    const auto spec = SmallSpec();
    const auto& a = First("en", 3);
    const auto& b = First("de", 3);
    const auto m = d::PairAndMix(a, dsp::ReadWav(a.path), b, dsp::ReadWav(b.path), spec, 5);
    const auto c = d::CropTrainSegment(m, 6.0, spec, 8);
    CHECK(c.mixture.size() == 96000);
    for (const auto& s : c.sources) CHECK(s.size() == 96000);
    CHECK(d::MinActivityRatio(m, c.crop_offset, 96000) >= spec.activity_ratio);
    CHECK(c.mixture.samples[123] == m.mixture.samples[c.crop_offset + 123]);
    CHECK(d::CropTrainSegment(m, 6.0, spec, 8).crop_offset == c.crop_offset);
    CHECK_THROWS_AS(d::CropTrainSegment(m, 60.0, spec, 8), tle::Error);
  }

  TEST_CASE("dataset build end to end") {
    const auto spec = SmallSpec();
    tt::TempDir out("build"), out2("build2");
    const auto result = d::BuildDataset(spec, Corpus().entries, out.path());
    for (d::Split s : d::kAllSplits) {
      const auto& rows = result.manifests[static_cast<int>(s)];
      CHECK(static_cast<int>(rows.size()) == spec.count(s));
      const auto csv = d::ReadManifestCsv(out / (d::SplitName(s) + ".csv"));
      REQUIRE(csv.size() == rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(csv[k].mixture_id == rows[k].mixture_id);
        CHECK(csv[k].seed == rows[k].seed);
        CHECK(csv[k].sources[0].gain == rows[k].sources[0].gain);
        CHECK(std::filesystem::exists(out / rows[k].mixture_wav));
        for (const auto& src : rows[k].sources) CHECK(std::filesystem::exists(out / src.wav));
        CHECK(rows[k].sources[0].language == "en");
        CHECK(rows[k].sources[1].language == "de");
        CHECK(rows[k].sources[0].speaker_id != rows[k].sources[1].speaker_id);
        if (s == d::Split::kTrain) CHECK(rows[k].crop_length_s == doctest::Approx(6.0));
      }
    }
    CHECK(result.stats["splits"]["dev"]["samples"] == 3);
    CHECK(result.stats["seed"] == 17);
    CHECK(nlohmann::json::parse(Slurp(out / "stats.json")) == result.stats);

    std::set<std::string> train_speakers;
    for (const auto& r : result.manifests[0]) {
      for (const auto& s : r.sources) train_speakers.insert(s.speaker_id);
    }
    for (int split : {1, 2}) {
      for (const auto& r : result.manifests[split]) {
        for (const auto& s : r.sources) CHECK(train_speakers.count(s.speaker_id) == 0);
      }
    }

    d::BuildDataset(spec, Corpus().entries, out2.path());
    for (const char* f : {"train.csv", "dev.csv", "test.csv", "stats.json"}) CHECK(Slurp(out / f) == Slurp(out2 / f));
    CHECK(Slurp(out / result.manifests[0][4].mixture_wav) == Slurp(out2 / result.manifests[0][4].mixture_wav));
  }

  TEST_CASE("mixtures reconstruct from the manifest") {
    const auto spec = SmallSpec();
    tt::TempDir out("recon");
    const auto result = d::BuildDataset(spec, Corpus().entries, out.path());
    for (int split : {0, 2}) {
      for (const auto& row : d::ReadManifestCsv(out / (d::SplitName(d::kAllSplits[split]) + ".csv"))) {
        const auto rebuilt = d::ReconstructMixture(row);
        const auto written = dsp::ReadWav(out / row.mixture_wav);
        REQUIRE(rebuilt.size() == written.size());
        double worst = 0.0;
        for (std::size_t n = 0; n < rebuilt.size(); ++n) {
          worst = std::max(worst, std::abs(dsp::QuantizePcm16(rebuilt.samples[n]) - written.samples[n]));
        }
        CHECK(worst <= 1.0 / 32768.0);
      }
    }
  }

  TEST_CASE("dev pool exhaustion is reported") {
    d::DatasetSpec spec = SmallSpec();
    spec.counts = {10, 1, 1};
    auto entries = Corpus().entries;
    for (auto& e : entries) {
      if (e.language == "de") e.speaker_id = "en" + e.speaker_id.substr(2);
    }
    tt::TempDir out("exhaust");
    CHECK_THROWS_WITH_AS(d::BuildDataset(spec, entries, out.path()), doctest::Contains("exhausted"), tle::Error);
  }

  TEST_CASE("toy synthesis is deterministic") {
    const auto a = d::SynthesizeUtterance("en", 3, 2.0, 48000, 11);
    const auto b = d::SynthesizeUtterance("en", 3, 2.0, 48000, 11);
    const auto c = d::SynthesizeUtterance("de", 3, 2.0, 48000, 11);
    CHECK(a.sample_rate == 48000);
    CHECK(a.size() == 96000);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(dsp::PeakAbs(a.samples) == doctest::Approx(0.5));
    std::set<std::string> speakers;
    for (const auto& e : Corpus().entries) speakers.insert(e.speaker_id);
    CHECK(speakers.size() == 24);
  }
}
