// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/eval/evaluate.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <torch/torch.h>

#include "tle/data/manifest.h"
#include "tle/dsp/si_snr.h"
#include "tle/dsp/wav_io.h"
#include "tle/eval/pesq.h"
#include "tle/eval/stoi.h"
#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace tle::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kPesqBatch = 64;

dsp::Waveform RunModel(model::Extractor& model, const dsp::Waveform& mixture) {
  torch::NoGradGuard no_grad;
  model->eval();
  std::vector<float> in(mixture.samples.begin(), mixture.samples.end());
  torch::Tensor out = model->forward(torch::tensor(in, torch::kFloat32)).to(torch::kFloat64).contiguous();
  const double* p = out.data_ptr<double>();
  return dsp::Waveform(std::vector<double>(p, p + out.numel()), mixture.sample_rate);
}

}  // namespace

std::string EstimateSourceName(EstimateSource s) {
  switch (s) {
    case EstimateSource::kModel: return "model";
    case EstimateSource::kOracle: return "oracle";
    case EstimateSource::kMixture: return "mixture";
  }
  return "?";
}

EstimateSource ParseEstimateSource(const std::string& name) {
  if (name == "model") return EstimateSource::kModel;
  if (name == "oracle") return EstimateSource::kOracle;
  if (name == "mixture") return EstimateSource::kMixture;
  Fail("unknown estimate source '", name, "' (expected model, oracle or mixture)");
}

void EvalConfig::Validate() const {
  TLE_CHECK(max_duration_s > 0.0, "eval.max_duration_s must be positive");
  TLE_CHECK(limit >= 0, "eval.limit must be non-negative");
  for (const auto& m : metrics) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), m) == kMetricNames.end()) {
      Fail("unknown metric '", m, "' (expected si_snr, stoi or pesq)");
    }
  }
}

bool EvalConfig::wants(const std::string& metric) const {
  return std::find(metrics.begin(), metrics.end(), metric) != metrics.end();
}

nlohmann::json EvalConfig::ToJson() const {
  return {{"metrics", metrics}, {"max_duration_s", max_duration_s}, {"pesq_command", pesq_command}, {"limit", limit}};
}

EvalConfig EvalConfig::FromJson(const nlohmann::json& j) {
  EvalConfig c;
  JsonReader(j, "eval")
      .Field("metrics", c.metrics)
      .Field("max_duration_s", c.max_duration_s)
      .Field("pesq_command", c.pesq_command)
      .Field("limit", c.limit)
      .Finish();
  c.Validate();
  return c;
}

void MetricsReport::Aggregate() {
  means.clear();
  excluded.clear();
  for (const auto& m : metrics) {
    double sum = 0.0;
    int finite = 0, bad = 0;
    for (const auto& row : rows) {
      auto it = row.values.find(m);
      if (it == row.values.end()) continue;
      if (std::isfinite(it->second)) {
        sum += it->second;
        ++finite;
      } else {
        ++bad;
      }
    }
    means[m] = finite > 0 ? sum / finite : kNaN;
    excluded[m] = bad;
  }
}

void MetricsReport::Check(std::optional<std::size_t> expected_rows) const {
  if (expected_rows && rows.size() != *expected_rows) {
    Fail("report holds ", rows.size(), " rows, manifest lists ", *expected_rows);
  }
  MetricsReport copy = *this;
  copy.Aggregate();
  for (const auto& m : metrics) {
    const double a = means.count(m) ? means.at(m) : kNaN;
    const double b = copy.means.at(m);
    if (!(a == b || (std::isnan(a) && std::isnan(b)))) Fail("mean ", m, " does not match its rows");
    if ((excluded.count(m) ? excluded.at(m) : 0) != copy.excluded.at(m)) Fail("exclusion count for ", m, " is off");
  }
}

nlohmann::json MetricsReport::ToJson() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = {{"mixture_id", row.mixture_id}};
    for (const auto& [k, v] : row.values) r[k] = num(v);
    jrows.push_back(r);
  }
  nlohmann::json jmeans = nlohmann::json::object();
  for (const auto& [k, v] : means) jmeans[k] = num(v);
  return {{"metadata", metadata}, {"metrics", metrics}, {"means", jmeans}, {"excluded", excluded}, {"rows", jrows}};
}

MetricsReport MetricsReport::FromJson(const nlohmann::json& j) {
  MetricsReport r;
  nlohmann::json jrows = nlohmann::json::array(), jmeans = nlohmann::json::object();
  JsonReader(j, "report")
      .Field("metadata", r.metadata)
      .Field("metrics", r.metrics)
      .Field("means", jmeans)
      .Field("excluded", r.excluded)
      .Field("rows", jrows)
      .Finish();
  auto num = [](const nlohmann::json& v) { return v.is_null() ? kNaN : v.get<double>(); };
  for (const auto& [k, v] : jmeans.items()) r.means[k] = num(v);
  for (const auto& jr : jrows) {
    SampleScores s;
    s.mixture_id = jr.at("mixture_id").get<std::string>();
    for (const auto& [k, v] : jr.items()) {
      if (k != "mixture_id") s.values[k] = num(v);
    }
    r.rows.push_back(std::move(s));
  }
  return r;
}

MetricsReport Evaluate(const EvalRequest& request, const EvalConfig& config) {
  config.Validate();
  if (request.source == EstimateSource::kModel && request.model == nullptr) {
    Fail("evaluate: model estimates need a checkpoint");
  }
  const auto manifest = request.dataset_root / (data::SplitName(request.split) + ".csv");
  std::vector<data::ManifestEntry> entries = data::ReadManifestCsv(manifest);
  if (config.limit > 0 && static_cast<std::size_t>(config.limit) < entries.size()) entries.resize(config.limit);

  std::vector<std::string> missing;
  for (const auto& e : entries) {
    if (!std::filesystem::exists(request.dataset_root / e.mixture_wav) ||
        !std::filesystem::exists(request.dataset_root / e.source(request.target_language).wav)) {
      missing.push_back(e.mixture_id);
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    Fail("missing audio for ", missing.size(), " mixture(s): ", ids);
  }

  MetricsReport report;
  report.metadata = {{"split", data::SplitName(request.split)},
                     {"target_language", request.target_language},
                     {"estimate", EstimateSourceName(request.source)},
                     {"dataset", request.dataset_root.string()},
                     {"stoi", "10 kHz, 15 third-octave bands, 384 ms windows"}};
  for (const auto& [k, v] : request.metadata.items()) report.metadata[k] = v;

  std::optional<PesqProvider> pesq;
  if (config.wants("pesq")) {
    pesq.emplace(config.pesq_command);
    if (pesq->Available()) {
      report.metadata["pesq"] = "wide-band, 16 kHz";
    } else {
      report.metadata["pesq"] = "unavailable";
      pesq.reset();
    }
  }
  for (const auto& m : kMetricNames) {
    if (config.wants(m) && (m != "pesq" || pesq)) report.metrics.push_back(m);
  }

  std::vector<dsp::Waveform> pending_ref, pending_deg;
  std::vector<std::size_t> pending_rows;
  auto flush_pesq = [&] {
    if (pending_rows.empty()) return;
    std::vector<std::optional<double>> scores;
    try {
      scores = pesq->Score(pending_ref, pending_deg);
    } catch (const Error&) {
      scores.assign(pending_rows.size(), std::nullopt);
    }
    for (std::size_t i = 0; i < pending_rows.size(); ++i) {
      report.rows[pending_rows[i]].values["pesq"] = scores[i].value_or(kNaN);
    }
    pending_ref.clear();
    pending_deg.clear();
    pending_rows.clear();
  };

  for (const auto& e : entries) {
    const dsp::Waveform mixture = dsp::ReadWav(request.dataset_root / e.mixture_wav);
    const dsp::Waveform target = dsp::ReadWav(request.dataset_root / e.source(request.target_language).wav);
    if (mixture.sample_rate != dsp::kModelRate || target.sample_rate != dsp::kModelRate ||
        mixture.size() != target.size()) {
      Fail("mixture ", e.mixture_id, ": mixture and target must share length and a 16 kHz rate");
    }
    if (mixture.duration() > config.max_duration_s) {
      Fail("mixture ", e.mixture_id, " lasts ", mixture.duration(), " s, above eval.max_duration_s = ",
           config.max_duration_s, "; raise the limit if memory allows");
    }
    dsp::Waveform estimate;
    switch (request.source) {
      case EstimateSource::kModel: estimate = RunModel(*request.model, mixture); break;
      case EstimateSource::kOracle: estimate = target; break;
      case EstimateSource::kMixture: estimate = mixture; break;
    }

    SampleScores row{e.mixture_id, {}};
    if (config.wants("si_snr")) {
      try {
        row.values["si_snr"] = dsp::SiSnr(target, estimate);
      } catch (const Error&) {
        row.values["si_snr"] = kNaN;
      }
    }
    if (config.wants("stoi")) {
      try {
        row.values["stoi"] = Stoi(target, estimate);
      } catch (const Error&) {
        row.values["stoi"] = kNaN;
      }
    }
    report.rows.push_back(std::move(row));
    if (pesq) {
      pending_ref.push_back(target);
      pending_deg.push_back(std::move(estimate));
      pending_rows.push_back(report.rows.size() - 1);
      if (pending_rows.size() == kPesqBatch) flush_pesq();
    }
  }
  if (pesq) flush_pesq();
  report.Aggregate();
  report.Check(entries.size());
  return report;
}

}  // namespace tle::eval
