// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <torch/torch.h>

#include "tle/data/builder.h"
#include "tle/data/corpus.h"
#include "tle/data/toy_corpus.h"
#include "tle/dsp/loudness.h"
#include "tle/dsp/resample.h"
#include "tle/dsp/si_snr.h"
#include "tle/dsp/wav_io.h"
#include "tle/eval/report.h"
#include "tle/eval/stoi.h"
#include "tle/model/checkpoint.h"
#include "tle/run_config.h"
#include "tle/util/config.h"
#include "tle/util/error.h"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

std::vector<double> ToVector(const Array& a) {
  if (a.ndim() != 1) throw tle::Error("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array ToArray(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

tle::dsp::Waveform ToWave(const Array& a, int rate) { return {ToVector(a), rate}; }

class PyExtractor {
 public:
  explicit PyExtractor(const std::filesystem::path& checkpoint)
      : model_(tle::model::ExtractorFromCheckpoint(tle::model::LoadCheckpoint(checkpoint))) {
    model_->eval();
  }

  Array Extract(const Array& mixture, int rate) {
    const tle::dsp::Waveform in = ToWave(mixture, rate);
    in.Validate();
    const tle::dsp::Waveform x = tle::dsp::Resample(in, tle::dsp::kModelRate);
    torch::Tensor out;
    {
      py::gil_scoped_release release;
      torch::NoGradGuard no_grad;
      std::vector<float> f(x.samples.begin(), x.samples.end());
      out = model_->forward(torch::tensor(f)).to(torch::kFloat64).contiguous();
    }
    const double* p = out.data_ptr<double>();
    tle::dsp::Waveform est(std::vector<double>(p, p + out.numel()), tle::dsp::kModelRate);
    est = tle::dsp::PadOrCrop(tle::dsp::Resample(est, rate), in.size());
    return ToArray(est.samples);
  }

  std::string Config() const { return model_->config().ToJson().dump(); }

 private:
  tle::model::Extractor model_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Target language extraction core";
  py::register_exception<tle::Error>(m, "TleError", PyExc_RuntimeError);

  m.def("si_snr", [](const Array& t, const Array& e) { return tle::dsp::SiSnr(ToVector(t), ToVector(e)); },
        py::arg("target"), py::arg("estimate"));
  m.def("stoi", [](const Array& t, const Array& e, int rate) { return tle::eval::Stoi(ToVector(t), ToVector(e), rate); },
        py::arg("target"), py::arg("estimate"), py::arg("rate"));
  m.def("integrated_loudness", [](const Array& x, int rate) { return tle::dsp::IntegratedLoudness(ToWave(x, rate)); },
        py::arg("samples"), py::arg("rate"));
  m.def("loudness_normalize",
        [](const Array& x, int rate, double lufs) {
          return ToArray(tle::dsp::LoudnessNormalize(ToWave(x, rate), lufs).samples);
        },
        py::arg("samples"), py::arg("rate"), py::arg("target_lufs"));
  m.def("resample", [](const Array& x, int rate, int new_rate) {
          return ToArray(tle::dsp::Resample(ToWave(x, rate), new_rate).samples);
        },
        py::arg("samples"), py::arg("rate"), py::arg("new_rate"));
  m.def("read_wav", [](const std::filesystem::path& p) {
          auto w = tle::dsp::ReadWav(p);
          return py::make_tuple(ToArray(w.samples), w.sample_rate);
        },
        py::arg("path"));
  m.def("write_wav", [](const std::filesystem::path& p, const Array& x, int rate) { tle::dsp::WriteWav(p, ToWave(x, rate)); },
        py::arg("path"), py::arg("samples"), py::arg("rate"));

  m.def("make_toy_corpus",
        [](const std::filesystem::path& dir, int utterances, int speakers, uint64_t seed) {
          tle::data::ToyCorpusSpec spec;
          spec.utterances_per_language = utterances;
          spec.speakers_per_language = speakers;
          spec.seed = seed;
          py::gil_scoped_release release;
          return tle::data::SynthesizeToyCorpus(spec, dir).size();
        },
        py::arg("out_dir"), py::arg("utterances_per_language") = 40, py::arg("speakers_per_language") = 20,
        py::arg("seed") = 0);
  m.def("build_dataset",
        [](const std::filesystem::path& corpus, const std::filesystem::path& out, const std::string& config,
           const std::vector<std::string>& overrides) {
          const auto cfg = tle::RunConfig::Resolve(config, overrides);
          const auto entries = tle::data::ReadCorpusTsv(corpus);
          nlohmann::json stats;
          {
            py::gil_scoped_release release;
            stats = tle::data::BuildDataset(cfg.data.spec, entries, out).stats;
          }
          return stats.dump();
        },
        py::arg("corpus"), py::arg("out_dir"), py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});
  m.def("render_table",
        [](const std::vector<std::filesystem::path>& files, bool beta_grid) {
          std::vector<tle::eval::MetricsReport> reports;
          for (const auto& f : files) reports.push_back(tle::eval::MetricsReport::FromJson(tle::ReadJsonFile(f)));
          return beta_grid ? tle::eval::RenderBetaGrid(reports) : tle::eval::RenderTable(reports);
        },
        py::arg("reports"), py::arg("beta_grid") = false);
  m.def("resolve_config",
        [](const std::string& file, const std::vector<std::string>& overrides) {
          return tle::RunConfig::Resolve(file, overrides).ToJson().dump();
        },
        py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

  py::class_<PyExtractor>(m, "Extractor")
      .def(py::init<const std::filesystem::path&>(), py::arg("checkpoint"))
      .def("extract", &PyExtractor::Extract, py::arg("mixture"), py::arg("rate") = tle::dsp::kModelRate)
      .def_property_readonly("config_json", &PyExtractor::Config);
}
