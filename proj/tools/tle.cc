// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tle/data/builder.h"
#include "tle/data/corpus.h"
#include "tle/data/toy_corpus.h"
#include "tle/dsp/resample.h"
#include "tle/dsp/wav_io.h"
#include "tle/eval/evaluate.h"
#include "tle/eval/report.h"
#include "tle/model/checkpoint.h"
#include "tle/run_config.h"
#include "tle/supervision/registry.h"
#include "tle/train/trainer.h"
#include "tle/util/config.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::string out;

  void Attach(CLI::App* app, const std::string& out_help) {
    app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override a config value, e.g. --set train.lr0=1e-4")
        ->allow_extra_args(false);
    app->add_option("--seed", seed, "Global seed (overrides the config)");
    app->add_option("--out", out, out_help);
  }

  tle::RunConfig Resolve() const { return tle::RunConfig::Resolve(config, overrides, seed); }
};

void RequireOut(const Common& c, const char* what) {
  if (c.out.empty()) tle::Fail("--out is required (", what, ")");
}

void EchoConfig(const fs::path& dir, const tle::RunConfig& cfg) {
  tle::WriteJsonFile(dir / "config.json", cfg.ToJson());
}

int CmdMakeToyCorpus(const std::string& out, const tle::data::ToyCorpusSpec& spec) {
  if (out.empty()) tle::Fail("--out is required (directory for the toy corpus)");
  const auto entries = tle::data::SynthesizeToyCorpus(spec, out);
  std::cout << "wrote " << entries.size() << " utterances and " << (fs::path(out) / "corpus.tsv").string() << "\n";
  return 0;
}

int CmdBuildData(const Common& c, const std::string& corpus_flag) {
  tle::RunConfig cfg = c.Resolve();
  if (!corpus_flag.empty()) cfg.data.corpus = corpus_flag;
  if (cfg.data.corpus.empty()) {
    tle::Fail("no corpus manifest given; pass --corpus <corpus.tsv> or set data.corpus (see tle build-data --help)");
  }
  RequireOut(c, "dataset output directory");
  const auto corpus = tle::data::ReadCorpusTsv(cfg.data.corpus);
  fs::create_directories(c.out);
  EchoConfig(c.out, cfg);
  const auto result = tle::data::BuildDataset(cfg.data.spec, corpus, c.out);
  std::cout << result.stats.dump(2) << "\n";
  return 0;
}

int CmdTrain(const Common& c, const std::string& data_flag, std::optional<int> stage_flag,
             const std::string& init_checkpoint) {
  tle::RunConfig cfg = c.Resolve();
  if (!data_flag.empty()) cfg.data.root = data_flag;
  if (stage_flag) cfg.train.stage = *stage_flag;
  cfg.train.Validate();
  if (cfg.data.root.empty()) tle::Fail("no dataset given; pass --data <dir> or set data.root");
  if (cfg.train.stage == 2 && init_checkpoint.empty()) {
    tle::Fail("stage 2 needs --init-checkpoint pointing at a stage-1 best.ckpt");
  }
  RequireOut(c, "training output directory");
  fs::create_directories(c.out);
  EchoConfig(c.out, cfg);

  const auto& t = cfg.train;
  const auto train_set = tle::train::LoadExamples(cfg.data.root, tle::data::Split::kTrain, cfg.data.target_language,
                                                  t.max_train_examples, t.segment_s);
  const auto dev_set = tle::train::LoadExamples(cfg.data.root, tle::data::Split::kDev, cfg.data.target_language,
                                                t.max_dev_examples, t.segment_s);

  std::unique_ptr<tle::supervision::SpeechEmbedder> embedder;
  tle::train::TrainOptions opt;
  opt.config = t;
  opt.seed = cfg.seed;
  opt.out_dir = c.out;
  opt.provenance = {{"target_language", cfg.data.target_language}};
  if (t.beta() > 0.0) {
    const auto registry = cfg.supervision.registry.empty() ? tle::supervision::ModelRegistry::Default()
                                                           : tle::supervision::ModelRegistry::Load(cfg.supervision.registry);
    const auto spec = registry.Lookup(cfg.supervision.model_id, cfg.supervision.layer_index);
    embedder = tle::supervision::CreateEmbedder(spec);
    opt.provenance["embedding_model"] = spec.ToJson();
  }
  opt.on_epoch = [](const tle::train::EpochRecord& r, tle::model::Extractor&) {
    std::cout << r.ToJson().dump() << std::endl;
    return true;
  };

  tle::model::Extractor model = tle::train::InitializeModel(cfg.model, t, cfg.seed, init_checkpoint);
  const double lr = tle::train::InitialLearningRate(t, init_checkpoint);
  const auto result = tle::train::TrainStage(model, train_set, dev_set, embedder.get(), opt, lr);
  std::cout << "stage " << t.stage << " finished after " << result.history.back().epoch << " epochs; best dev loss "
            << result.schedule.best_dev_loss << " at epoch " << result.schedule.best_epoch
            << (result.early_stopped ? " (early stop)" : "") << "\n";
  return 0;
}

struct EvalFlags {
  std::string checkpoint, data, split = "test", estimate = "model", method, language;
};

int CmdEvaluate(const Common& c, const EvalFlags& f) {
  tle::RunConfig cfg = c.Resolve();
  if (!f.data.empty()) cfg.data.root = f.data;
  if (!f.language.empty()) cfg.data.target_language = f.language;
  if (cfg.data.root.empty()) tle::Fail("no dataset given; pass --data <dir> or set data.root");
  const auto source = tle::eval::ParseEstimateSource(f.estimate);
  if (source == tle::eval::EstimateSource::kModel && f.checkpoint.empty()) {
    tle::Fail("--checkpoint is required for model estimates");
  }
  RequireOut(c, "report directory");

  tle::eval::EvalRequest req;
  req.dataset_root = cfg.data.root;
  req.split = tle::data::ParseSplit(f.split);
  req.target_language = cfg.data.target_language;
  req.source = source;
  std::optional<tle::model::Extractor> model;
  std::string method = f.method;
  if (!f.checkpoint.empty() && source == tle::eval::EstimateSource::kModel) {
    if (!fs::exists(f.checkpoint)) tle::Fail("checkpoint ", f.checkpoint, " does not exist");
    const auto ckpt = tle::model::LoadCheckpoint(f.checkpoint);
    model = tle::model::ExtractorFromCheckpoint(ckpt);
    req.model = &*model;
    req.metadata["checkpoint"] = fs::absolute(f.checkpoint).string();
    const auto& ts = ckpt.train_state;
    if (ts.is_object()) {
      if (ts.contains("beta")) req.metadata["beta"] = ts["beta"];
      if (ts.contains("embedding_model")) req.metadata["embedding_model"] = ts["embedding_model"]["model_id"];
      if (method.empty() && ts.contains("stage")) method = ts["stage"] == 1 ? "baseline" : "mae-supervised";
    }
  }
  req.metadata["method"] = method.empty() ? f.estimate : method;

  const auto report = tle::eval::Evaluate(req, cfg.eval);
  fs::create_directories(c.out);
  EchoConfig(c.out, cfg);
  tle::WriteJsonFile(fs::path(c.out) / "report.json", report.ToJson());
  const std::string table = tle::eval::RenderTable({report});
  std::ofstream(fs::path(c.out) / "report.txt") << table;
  std::cout << table;
  for (const auto& [metric, count] : report.excluded) {
    if (count > 0) std::cout << count << " sample(s) excluded from the " << metric << " mean\n";
  }
  if (report.metadata.value("pesq", "") == "unavailable") std::cout << "PESQ provider unavailable; column omitted\n";
  return 0;
}

int CmdReport(const std::vector<std::string>& files, bool beta_grid, const std::string& out) {
  if (files.empty()) tle::Fail("pass one or more report.json files");
  std::vector<tle::eval::MetricsReport> reports;
  for (const auto& f : files) {
    reports.push_back(tle::eval::MetricsReport::FromJson(tle::ReadJsonFile(f)));
    reports.back().Check();
  }
  const std::string text = beta_grid ? tle::eval::RenderBetaGrid(reports) : tle::eval::RenderTable(reports);
  std::cout << text;
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / (beta_grid ? "beta_grid.txt" : "table.txt")) << text;
    tle::WriteJsonFile(fs::path(out) / "reports.json", tle::eval::ReportsJson(reports));
  }
  return 0;
}

int CmdExtract(const std::string& checkpoint, const std::string& input, const std::string& out, bool resample) {
  if (checkpoint.empty() || input.empty() || out.empty()) tle::Fail("extract needs --checkpoint, --input and --out");
  const tle::dsp::Waveform in = tle::dsp::ReadWav(input);
  if (in.sample_rate != tle::dsp::kModelRate && !resample) {
    tle::Fail(input, " is sampled at ", in.sample_rate, " Hz; the extractor expects ", tle::dsp::kModelRate,
              " Hz (rerun with --resample)");
  }
  auto model = tle::model::ExtractorFromCheckpoint(tle::model::LoadCheckpoint(checkpoint));
  const tle::dsp::Waveform x = tle::dsp::Resample(in, tle::dsp::kModelRate);
  if (static_cast<int64_t>(x.size()) < model->config().enc_kernel) {
    tle::Fail(input, " is too short: need at least ", model->config().enc_kernel, " samples at 16 kHz");
  }
  torch::NoGradGuard no_grad;
  std::vector<float> samples(x.samples.begin(), x.samples.end());
  torch::Tensor y = model->forward(torch::tensor(samples, torch::kFloat32)).to(torch::kFloat64).contiguous();
  tle::dsp::Waveform est(std::vector<double>(y.data_ptr<double>(), y.data_ptr<double>() + y.numel()),
                         tle::dsp::kModelRate);
  est = tle::dsp::PadOrCrop(tle::dsp::Resample(est, in.sample_rate), in.size());
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  tle::dsp::WriteWav(out, est);
  std::cout << "wrote " << out << " (" << est.size() << " samples at " << est.sample_rate << " Hz)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target language extraction toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tle 0.1.0");

  auto* toy = app.add_subcommand("make-toy-corpus", "Synthesize a small bilingual speech-like corpus");
  std::string toy_out;
  tle::data::ToyCorpusSpec toy_spec;
  uint64_t toy_seed = 0;
  toy->add_option("--out", toy_out, "Output directory");
  toy->add_option("--seed", toy_seed, "Seed");
  toy->add_option("--utterances", toy_spec.utterances_per_language, "Utterances per language");
  toy->add_option("--speakers", toy_spec.speakers_per_language, "Speakers per language");
  toy->add_option("--min-duration", toy_spec.min_duration_s, "Shortest utterance in seconds");
  toy->add_option("--max-duration", toy_spec.max_duration_s, "Longest utterance in seconds");
  toy->add_option("--rate", toy_spec.sample_rate, "Sample rate in Hz");

  Common build_common, train_common, eval_common;
  auto* build = app.add_subcommand("build-data", "Build mixture manifests and audio from a corpus TSV");
  build_common.Attach(build, "Dataset output directory");
  std::string corpus;
  build->add_option("--corpus", corpus, "Corpus TSV with path, speaker_id, duration and language columns");

  auto* train = app.add_subcommand("train", "Run one training stage");
  train_common.Attach(train, "Directory for checkpoints and history");
  std::string train_data, init_ckpt;
  std::optional<int> stage;
  train->add_option("--data", train_data, "Dataset directory produced by build-data");
  train->add_option("--stage", stage, "1 (SI-SNR only) or 2 (adds the embedding loss)")->check(CLI::Range(1, 2));
  train->add_option("--init-checkpoint", init_ckpt, "Checkpoint to start from (required for stage 2)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset split");
  eval_common.Attach(evaluate, "Directory for report.json and report.txt");
  EvalFlags ef;
  evaluate->add_option("--checkpoint", ef.checkpoint, "Extractor checkpoint");
  evaluate->add_option("--data", ef.data, "Dataset directory");
  evaluate->add_option("--split", ef.split, "train, dev or test");
  evaluate->add_option("--estimate", ef.estimate, "model, oracle or mixture");
  evaluate->add_option("--method", ef.method, "Method label for the report");
  evaluate->add_option("--language", ef.language, "Target language tag");

  auto* report = app.add_subcommand("report", "Render stored report.json files as a table");
  std::vector<std::string> report_files;
  bool beta_grid = false;
  std::string report_out;
  report->add_option("reports", report_files, "report.json files");
  report->add_flag("--beta-grid", beta_grid, "Lay reports out by beta and language");
  report->add_option("--out", report_out, "Directory for the rendered table and merged JSON");

  auto* extract = app.add_subcommand("extract", "Extract the target language from one WAV file");
  std::string x_ckpt, x_in, x_out;
  bool x_resample = false;
  extract->add_option("--checkpoint", x_ckpt, "Extractor checkpoint");
  extract->add_option("--input", x_in, "Input mixture WAV");
  extract->add_option("--out", x_out, "Output WAV");
  extract->add_flag("--resample", x_resample, "Accept inputs at any rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*toy) {
      toy_spec.seed = toy_seed;
      return CmdMakeToyCorpus(toy_out, toy_spec);
    }
    if (*build) return CmdBuildData(build_common, corpus);
    if (*train) return CmdTrain(train_common, train_data, stage, init_ckpt);
    if (*evaluate) return CmdEvaluate(eval_common, ef);
    if (*report) return CmdReport(report_files, beta_grid, report_out);
    if (*extract) return CmdExtract(x_ckpt, x_in, x_out, x_resample);
  } catch (const tle::train::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
