// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "doctest_torch.h"

#include "test_support.h"
#include "tle/data/builder.h"
#include "tle/data/toy_corpus.h"
#include "tle/dsp/resample.h"
#include "tle/eval/evaluate.h"
#include "tle/eval/pesq.h"
#include "tle/eval/report.h"
#include "tle/eval/stoi.h"
#include "tle/model/extractor.h"
#include "tle/util/error.h"

namespace ev = tle::eval;
namespace dsp = tle::dsp;
namespace tt = tle::testing;

namespace {

std::vector<double> Noisy(double level) {
  auto s = tt::ReadF64("speech16k.f64");
  const auto n = tt::ReadF64("noise16k.f64");
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += level * n[i];
  return s;
}

struct SharedDataset {
  tt::TempDir corpus{"eval-corpus"}, root{"eval-ds"};
  SharedDataset() {
    tle::data::ToyCorpusSpec cs;
    cs.utterances_per_language = 12;
    cs.speakers_per_language = 6;
    cs.min_duration_s = 7.0;
    cs.max_duration_s = 8.0;
    tle::data::DatasetSpec spec;
    spec.counts = {2, 2, 3};
    tle::data::BuildDataset(spec, tle::data::SynthesizeToyCorpus(cs, corpus.path()), root.path());
  }
};

const SharedDataset& Dataset() {
  static SharedDataset d;
  return d;
}

ev::EvalConfig NoPesq() {
  ev::EvalConfig c;
  c.metrics = {"si_snr", "stoi"};
  return c;
}

ev::MetricsReport Fake(const std::string& split, const std::string& lang, const std::string& method, double si,
                       double stoi, double pesq) {
  ev::MetricsReport r;
  r.metrics = {"si_snr", "stoi", "pesq"};
  r.rows.push_back({"x", {{"si_snr", si}, {"stoi", stoi}, {"pesq", pesq}}});
  r.metadata = {{"split", split}, {"target_language", lang}, {"method", method}};
  r.Aggregate();
  return r;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("stoi matches the reference implementation") {
    const auto& ref = tt::Oracles()["stoi"];
    const auto speech = tt::ReadF64("speech16k.f64");
    CHECK(std::abs(ev::Stoi(speech, speech, 16000) - ref["self"].get<double>()) < 1e-6);
    CHECK(std::abs(ev::Stoi(speech, tt::ReadF64("noise16k.f64"), 16000) - ref["noise_only"].get<double>()) < 1e-6);
    CHECK(ev::Stoi(speech, speech, 16000) >= 0.999);
    CHECK(ev::Stoi(speech, tt::ReadF64("noise16k.f64"), 16000) < 0.3);
    double prev = 1.0;
    for (std::size_t i = 0; i < ref["levels"].size(); ++i) {
      const double v = ev::Stoi(speech, Noisy(ref["levels"][i].get<double>()), 16000);
      CHECK(std::abs(v - ref["noisy"][i].get<double>()) < 1e-6);
      CHECK(v < prev);
      prev = v;
    }
  }

  TEST_CASE("stoi resampling matches the reference filter") {
    const auto speech = tt::ReadF64("speech16k.f64");
    const auto want = tt::ReadF64("resample_oct_speech.f64");
    const auto got = dsp::ResamplePoly(speech, 5, 8, ev::StoiResampleFilter(5, 8));
    REQUIRE(got.size() == want.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    CHECK(worst < 1e-10);
  }

  TEST_CASE("stoi input checks") {
    const auto speech = tt::ReadF64("speech16k.f64");
    std::vector<double> short_clip(speech.begin(), speech.begin() + 4000);
    CHECK_THROWS_AS(ev::Stoi(short_clip, short_clip, 16000), tle::Error);
    CHECK_THROWS_AS(ev::Stoi(speech, short_clip, 16000), tle::Error);
    std::vector<double> tiny(100, 0.1);
    CHECK_THROWS_AS(ev::Stoi(tiny, tiny, 16000), tle::Error);
  }

  TEST_CASE("pesq provider") {
    ev::PesqProvider provider;
    if (!provider.Available()) {
      MESSAGE("pesq package not installed; provider checks skipped");
      return;
    }
    const auto& ref = tt::Oracles()["pesq"];
    REQUIRE(!ref.is_null());
    const dsp::Waveform speech(tt::ReadF64("speech16k.f64"), 16000);
    std::vector<dsp::Waveform> refs = {speech}, degs = {speech};
    for (const auto& level : ref["levels"]) {
      refs.push_back(speech);
      degs.emplace_back(Noisy(level.get<double>()), 16000);
    }
    refs.push_back(speech);
    degs.emplace_back(std::vector<double>(speech.size(), 0.0), 16000);
    const auto scores = ev::PesqProvider().Score(refs, degs);
    REQUIRE(scores.size() == refs.size());
    REQUIRE(scores[0].has_value());
    CHECK(std::abs(*scores[0] - ref["self"].get<double>()) < 1e-4);
    for (std::size_t i = 0; i < ref["noisy"].size(); ++i) {
      REQUIRE(scores[i + 1].has_value());
      CHECK(std::abs(*scores[i + 1] - ref["noisy"][i].get<double>()) < 1e-4);
    }
    CHECK(!scores.back().has_value());
    CHECK_THROWS_AS(provider.Score({dsp::Waveform({0.1}, 8000)}, {dsp::Waveform({0.1}, 8000)}), tle::Error);
  }

  TEST_CASE("missing pesq provider drops the column") {
    ev::EvalConfig cfg;
    cfg.pesq_command = "false";
    ev::EvalRequest req{Dataset().root.path(), tle::data::Split::kDev, "en", ev::EstimateSource::kOracle};
    const auto report = ev::Evaluate(req, cfg);
    CHECK(report.metadata["pesq"] == "unavailable");
    CHECK(report.metrics == std::vector<std::string>{"si_snr", "stoi"});
    CHECK(!ev::PesqProvider("false").Available());
  }

  TEST_CASE("oracle and mixture estimates") {
    ev::EvalRequest req{Dataset().root.path(), tle::data::Split::kTest, "en", ev::EstimateSource::kOracle};
    const auto oracle = ev::Evaluate(req, NoPesq());
    CHECK(oracle.rows.size() == 3);
    CHECK(oracle.means.at("si_snr") >= 60.0);
    CHECK(oracle.means.at("stoi") >= 0.999);
    CHECK(oracle.metadata["estimate"] == "oracle");
    req.source = ev::EstimateSource::kMixture;
    req.metadata = {{"method", "unprocessed"}};
    const auto mix = ev::Evaluate(req, NoPesq());
    CHECK(mix.means.at("si_snr") < 30.0);
    CHECK(mix.means.at("stoi") < oracle.means.at("stoi"));
    CHECK(mix.metadata["method"] == "unprocessed");
    CHECK_NOTHROW(mix.Check(3));
    CHECK_THROWS_AS(mix.Check(4), tle::Error);
  }

  TEST_CASE("model estimates and guards") {
    tle::model::ModelConfig c;
    c.feat_dim = 16;
    c.n_heads = 2;
    c.ff_dim = 32;
    c.n_intra_layers = 1;
    c.n_inter_layers = 1;
    auto net = tle::model::MakeExtractor(c, 0);
    ev::EvalRequest req{Dataset().root.path(), tle::data::Split::kDev, "de", ev::EstimateSource::kModel};
    CHECK_THROWS_AS(ev::Evaluate(req, NoPesq()), tle::Error);
    req.model = &net;
    ev::EvalConfig cfg = NoPesq();
    cfg.limit = 1;
    const auto report = ev::Evaluate(req, cfg);
    CHECK(report.rows.size() == 1);
    CHECK(std::isfinite(report.means.at("si_snr")));
    cfg.max_duration_s = 1.0;
    CHECK_THROWS_WITH_AS(ev::Evaluate(req, cfg), doctest::Contains("max_duration_s"), tle::Error);
    cfg.metrics = {"sdr"};
    CHECK_THROWS_AS(ev::Evaluate(req, cfg), tle::Error);
  }

  TEST_CASE("missing audio is listed") {
    tt::TempDir copy("eval-copy");
    std::filesystem::copy(Dataset().root.path(), copy.path(), std::filesystem::copy_options::recursive);
    std::filesystem::remove(copy / "audio/test/test_000002/src_en.wav");
    ev::EvalRequest req{copy.path(), tle::data::Split::kTest, "en", ev::EstimateSource::kOracle};
    CHECK_THROWS_WITH_AS(ev::Evaluate(req, NoPesq()), doctest::Contains("test_000002"), tle::Error);
  }

  TEST_CASE("report json round trip keeps failures") {
    ev::MetricsReport r = Fake("test", "en", "baseline", 10.0, 0.8, std::nan(""));
    r.rows.push_back({"y", {{"si_snr", 12.0}, {"stoi", 0.9}, {"pesq", 2.0}}});
    r.Aggregate();
    CHECK(r.means["si_snr"] == 11.0);
    CHECK(r.means["pesq"] == 2.0);
    CHECK(r.excluded["pesq"] == 1);
    const auto j = r.ToJson();
    CHECK(j["rows"][0]["pesq"].is_null());
    const auto back = ev::MetricsReport::FromJson(j);
    CHECK(std::isnan(back.rows[0].values.at("pesq")));
    CHECK(back.means.at("stoi") == r.means.at("stoi"));
    CHECK_NOTHROW(back.Check(2));
    auto tampered = back;
    tampered.means["si_snr"] = 99.0;
    CHECK_THROWS_AS(tampered.Check(), tle::Error);
  }

  TEST_CASE("results table layout") {
    std::vector<ev::MetricsReport> reports = {
        Fake("test", "en", "mae-supervised", 11.18, 0.84, 2.05), Fake("test", "en", "baseline", 9.96, 0.82, 1.85),
        Fake("test", "de", "baseline", 8.5, 0.8, 1.7), Fake("dev", "en", "baseline", 10.0, 0.83, std::nan(""))};
    const std::string table = ev::RenderTable(reports);
    std::vector<std::string> lines;
    std::istringstream is(table);
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0].find("Set") != std::string::npos);
    CHECK(lines[0].find("Target Lang") != std::string::npos);
    CHECK(lines[0].find("SI-SNR (dB)") != std::string::npos);
    CHECK(lines[1].find_first_not_of("=+") == std::string::npos);
    CHECK(lines[2].find("dev") != std::string::npos);
    CHECK(lines[2].find("10.00") != std::string::npos);
    CHECK(lines[2].find(" - ") != std::string::npos);
    CHECK(lines[3].find_first_not_of("=+") == std::string::npos);
    CHECK(lines[4].find("test") != std::string::npos);
    CHECK(lines[4].find("English") != std::string::npos);
    CHECK(lines[4].find("11.18") != std::string::npos);
    CHECK(lines[5].find("English") == std::string::npos);
    CHECK(lines[5].find("9.96") != std::string::npos);
    CHECK(lines[5].find("1.85") != std::string::npos);
    CHECK(lines[6].find_first_not_of("-+") == std::string::npos);
    CHECK(lines[7].find("German") != std::string::npos);
  }

  TEST_CASE("beta grid layout") {
    std::vector<ev::MetricsReport> reports;
    for (double beta : {10.0, 0.0, 0.5}) {
      for (const char* lang : {"en", "de"}) {
        auto r = Fake("test", lang, "x", beta, 0.8, 2.0);
        r.metadata["beta"] = beta;
        reports.push_back(r);
      }
    }
    const std::string grid = ev::RenderBetaGrid(reports);
    CHECK(grid.find("English") != std::string::npos);
    CHECK(grid.find("German") != std::string::npos);
    CHECK(grid.find("0.5") < grid.find("10.00"));
    reports.push_back(reports[0]);
    CHECK_THROWS_AS(ev::RenderBetaGrid(reports), tle::Error);
    reports.back().metadata.erase("beta");
    CHECK_THROWS_AS(ev::RenderBetaGrid(reports), tle::Error);
  }

  TEST_CASE("estimate source names") {
    for (auto s : {ev::EstimateSource::kModel, ev::EstimateSource::kOracle, ev::EstimateSource::kMixture}) {
      CHECK(ev::ParseEstimateSource(ev::EstimateSourceName(s)) == s);
    }
    CHECK_THROWS_AS(ev::ParseEstimateSource("ideal"), tle::Error);
  }
}
