// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <torch/torch.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tle/data/builder.h"
#include "tle/data/corpus.h"
#include "tle/data/manifest.h"
#include "tle/data/toy_corpus.h"
#include "tle/dsp/resample.h"
#include "tle/dsp/si_snr.h"
#include "tle/dsp/wav_io.h"
#include "tle/eval/report.h"
#include "tle/model/checkpoint.h"
#include "tle/model/extractor.h"
#include "tle/run_config.h"
#include "tle/supervision/embedder.h"
#include "tle/supervision/losses.h"
#include "tle/supervision/registry.h"
#include "tle/train/schedule.h"
#include "tle/train/trainer.h"
#include "tle/util/rng.h"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok: " : "FAILED: ") + what);
  }
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

fs::path SourceDir() { return fs::path(TLE_SOURCE_DIR); }

fs::path WorkDir() {
  static const fs::path dir = [] {
    std::random_device rd;
    fs::path p = fs::temp_directory_path() / ("tle-acceptance-" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::vector<double> ReadF64(const std::string& name) {
  std::ifstream is(SourceDir() / "tests" / "fixtures" / name, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("missing fixture " + name);
  std::vector<double> v(static_cast<std::size_t>(is.tellg()) / sizeof(double));
  is.seekg(0);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  return v;
}

double RelErr(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// ---------------------------------------------------------------------------
// 1. SI-SNR
// ---------------------------------------------------------------------------
Outcome SiSnrSuite() {
  Outcome out;
  const double hand = tle::dsp::SiSnr(std::vector<double>{1, 0}, std::vector<double>{1, 1});
  out.Expect(std::abs(hand) <= 1e-9, "target [1,0], estimate [1,1] gives " + Fmt("%.3g", hand) + " dB");

  tle::Rng rng(2024);
  double worst_scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 16 + rng.Index(500);
    std::vector<double> t(n), e(n), ce(n);
    for (std::size_t k = 0; k < n; ++k) {
      t[k] = rng.Normal();
      e[k] = rng.Normal();
    }
    const double c = std::exp(rng.Uniform(-6.0, 6.0));
    for (std::size_t k = 0; k < n; ++k) ce[k] = c * e[k];
    worst_scale = std::max(worst_scale, std::abs(tle::dsp::SiSnr(t, ce) - tle::dsp::SiSnr(t, e)));
  }
  out.Expect(worst_scale < 1e-6, "scale invariance over 1000 pairs, max |delta| " + Fmt("%.2e", worst_scale) + " dB");

  torch::manual_seed(7);
  double worst_grad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto t = torch::randn({128}, torch::kFloat64);
    auto e = (0.5 * t + torch::randn({128}, torch::kFloat64)).set_requires_grad(true);
    tle::dsp::SiSnrLoss(t, e).backward();
    auto grad = e.grad();
    torch::NoGradGuard no_grad;
    for (int64_t i = 0; i < 128; i += 9) {
      const double h = 1e-6;
      auto plus = e.detach().clone(), minus = e.detach().clone();
      plus[i] += h;
      minus[i] -= h;
      const double fd = (tle::dsp::SiSnrLoss(t, plus).item<double>() - tle::dsp::SiSnrLoss(t, minus).item<double>()) / (2 * h);
      worst_grad = std::max(worst_grad, RelErr(grad[i].item<double>(), fd, 1e-6));
    }
  }
  out.Expect(worst_grad < 1e-3, "gradient vs central differences, max rel. err " + Fmt("%.2e", worst_grad));
  return out;
}

// ---------------------------------------------------------------------------
// 2. Embedding loss
// ---------------------------------------------------------------------------
Outcome MaeSuite() {
  namespace sv = tle::supervision;
  Outcome out;
  auto zeros = torch::zeros({49, 32}, torch::kFloat64);
  const double one = sv::MaeLoss(zeros, zeros + 1.0).item<double>();
  const double tenth = sv::MaeLoss(zeros, zeros + 0.1).item<double>();
  const double same = sv::MaeLoss(zeros, zeros).item<double>();
  out.Expect(std::abs(one) <= 1e-9, "constant difference 1.0 gives " + Fmt("%.3g", one) + " dB");
  out.Expect(std::abs(tenth + 10.0) <= 1e-9, "constant difference 0.1 gives " + Fmt("%.12g", tenth) + " dB");
  out.Expect(std::abs(same - 10.0 * std::log10(1e-8)) <= 1e-9, "identical embeddings clamp at " + Fmt("%.12g", same) + " dB");

  // One frozen-model load: the multilingual export when present, otherwise
  // the small TorchScript model bundled with the test fixtures.
  const auto registry = sv::ModelRegistry::Default();
  auto spec = registry.Lookup("mhubert-147");
  fs::path cache = sv::ModelCacheDir();
  if (!fs::exists(cache / spec.file)) {
    spec = registry.Lookup("random-tiny");
    cache = SourceDir() / "tests" / "fixtures";
  }
  auto embedder = sv::CreateEmbedder(spec, cache);
  out.notes.push_back("frozen model: " + spec.model_id + " (" + spec.backend + ")");

  const auto speech = ReadF64("speech16k.f64");
  const auto noise = ReadF64("noise16k.f64");
  auto target = torch::tensor(std::vector<double>(speech.begin(), speech.begin() + 16000)).to(torch::kFloat32);
  auto interferer = torch::tensor(std::vector<double>(noise.begin(), noise.begin() + 16000)).to(torch::kFloat32);
  auto mixture = (target + interferer).unsqueeze(0);
  target = target.unsqueeze(0);

  tle::model::ModelConfig cfg;
  cfg.feat_dim = 32;
  cfg.n_heads = 4;
  cfg.ff_dim = 64;
  cfg.n_intra_layers = 1;
  cfg.n_inter_layers = 1;
  cfg.chunk_len = 50;
  cfg.chunk_hop = 25;
  auto net = tle::model::MakeExtractor(cfg, 3);

  auto est = net->forward(mixture);
  auto zero_beta = sv::CombinedLoss(target, est, {0.0}, embedder.get());
  out.Expect(torch::equal(zero_beta.total, tle::dsp::SiSnrLoss(target, est)) && embedder->invocations() == 0,
             "beta = 0 combined loss bit-equals the SI-SNR loss without calling the model");

  const auto before = embedder->Parameters();
  tle::NamedTensors net_before;
  for (const auto& [name, t] : tle::model::ParametersOf(net)) net_before.emplace_back(name, t.detach().clone());
  torch::optim::Adam opt(net->parameters(), torch::optim::AdamOptions(1e-3));
  for (int step = 0; step < 10; ++step) {
    opt.zero_grad();
    sv::CombinedLoss(target, net->forward(mixture), {1.0}, embedder.get()).total.mean().backward();
    opt.step();
  }
  const auto after = embedder->Parameters();
  bool identical = before.size() == after.size() && !before.empty();
  for (std::size_t i = 0; identical && i < before.size(); ++i) {
    identical = before[i].first == after[i].first && torch::equal(before[i].second, after[i].second);
  }
  out.Expect(identical, std::to_string(before.size()) + " embedding tensors bit-identical after 10 training steps");
  const auto net_after = tle::model::ParametersOf(net);
  bool moved = false;
  for (std::size_t i = 0; i < net_before.size(); ++i) moved = moved || !torch::equal(net_before[i].second, net_after[i].second);
  out.Expect(moved, "extractor parameters were updated through the frozen model");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Architecture
// ---------------------------------------------------------------------------
Outcome ArchitectureSuite() {
  namespace m = tle::model;
  Outcome out;
  tle::Rng rng(99);
  torch::manual_seed(99);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    m::ModelConfig c;
    c.chunk_len = 1 + static_cast<int>(rng.Index(120));
    c.chunk_hop = 1 + static_cast<int>(rng.Index(c.chunk_len));
    const int64_t frames = 1 + static_cast<int64_t>(rng.Index(700));
    auto x = torch::randn({1 + static_cast<int64_t>(rng.Index(3)), frames, 1 + static_cast<int64_t>(rng.Index(48))},
                          torch::kFloat64);
    worst = std::max(worst, (m::MergeChunks(m::Segment(x, c), c) - x).abs().max().item<double>());
  }
  out.Expect(worst <= 1e-6, "merge_chunks(segment(x)) over 200 random shapes, max error " + Fmt("%.2e", worst));
  {
    const m::ModelConfig c;
    auto x = torch::randn({2, 2000, c.feat_dim});
    const double err = (m::MergeChunks(m::Segment(x, c), c) - x).abs().max().item<double>();
    out.Expect(err <= 1e-6, "float32 round trip at the model chunk geometry, max error " + Fmt("%.2e", err));
  }

  const m::ModelConfig full;
  auto net = m::MakeExtractor(full, 0);
  net->eval();
  bool lengths_ok = true;
  std::string seen;
  {
    torch::NoGradGuard no_grad;
    for (int64_t len : {static_cast<int64_t>(full.enc_kernel), int64_t{16000}, int64_t{96000}, int64_t{4099},
                        int64_t{16001}, int64_t{32003}}) {
      const int64_t got = net->forward(torch::randn({len})).size(0);
      lengths_ok = lengths_ok && got == len;
      seen += (seen.empty() ? "" : ", ") + std::to_string(len) + "->" + std::to_string(got);
    }
  }
  out.Expect(lengths_ok, "extract preserves length with the full-size model (" + seen + ")");

  // Finite differences through the whole network in double precision.
  net->to(torch::kFloat64);
  auto x = torch::randn({1, 3200}, torch::kFloat64);
  auto target = torch::randn({1, 3200}, torch::kFloat64);
  x = x.set_requires_grad(true);
  auto loss_of = [&](const torch::Tensor& input) { return tle::dsp::SiSnrLoss(target, net->forward(input)).sum(); };
  net->zero_grad();
  loss_of(x).backward();
  const double h = 1e-6;
  double worst_grad = 0.0;
  int checked = 0;
  torch::NoGradGuard no_grad;
  for (int64_t i : {100, 901, 1777, 2999}) {
    auto plus = x.detach().clone(), minus = x.detach().clone();
    plus[0][i] += h;
    minus[0][i] -= h;
    const double fd = (loss_of(plus).item<double>() - loss_of(minus).item<double>()) / (2 * h);
    worst_grad = std::max(worst_grad, RelErr(x.grad()[0][i].item<double>(), fd, 1e-8));
    ++checked;
  }
  const std::set<std::string> picks = {"encoder.weight", "blocks.0.intra.layers.0.ff1.weight",
                                       "blocks.0.inter.layers.7.attn.in_proj.weight", "mask_out.weight", "decoder.weight"};
  for (auto& item : net->named_parameters()) {
    if (!picks.count(item.key())) continue;
    torch::Tensor p = item.value();
    const int64_t idx = p.grad().abs().reshape({-1}).argmax().item<int64_t>();
    const double an = p.grad().reshape({-1})[idx].item<double>();
    auto flat = p.view({-1});
    const double orig = flat[idx].item<double>();
    flat[idx] = orig + h;
    const double fp = loss_of(x.detach()).item<double>();
    flat[idx] = orig - h;
    const double fm = loss_of(x.detach()).item<double>();
    flat[idx] = orig;
    worst_grad = std::max(worst_grad, RelErr(an, (fp - fm) / (2 * h), 1e-8));
    ++checked;
  }
  out.Expect(checked == 9 && worst_grad < 1e-2,
             "end-to-end gradient on 0.2 s input, " + std::to_string(checked) + " coordinates, max rel. err " +
                 Fmt("%.2e", worst_grad));
  return out;
}

// ---------------------------------------------------------------------------
// 4. Dataset
// ---------------------------------------------------------------------------
struct ToyData {
  tle::RunConfig config;
  std::vector<tle::data::CorpusEntry> corpus;
  fs::path root;
};

const ToyData& SharedToyData() {
  static const ToyData data = [] {
    ToyData d;
    d.config = tle::RunConfig::Resolve(SourceDir() / "configs" / "toy.json", {});
    d.corpus = tle::data::SynthesizeToyCorpus(tle::data::ToyCorpusSpec{}, WorkDir() / "corpus");
    d.root = WorkDir() / "dataset_a";
    tle::data::BuildDataset(d.config.data.spec, d.corpus, d.root);
    return d;
  }();
  return data;
}

bool SameTree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::map<std::string, fs::path> la, lb;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) la[fs::relative(e.path(), a).string()] = e.path();
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) lb[fs::relative(e.path(), b).string()] = e.path();
  }
  files = la.size();
  if (la.size() != lb.size()) return false;
  for (const auto& [rel, pa] : la) {
    auto it = lb.find(rel);
    if (it == lb.end()) return false;
    std::ifstream fa(pa, std::ios::binary), fb(it->second, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    if (sa != sb) return false;
  }
  return true;
}

Outcome DatasetSuite() {
  namespace d = tle::data;
  Outcome out;
  const ToyData& toy = SharedToyData();
  const d::DatasetSpec& spec = toy.config.data.spec;
  out.notes.push_back("toy corpus of " + std::to_string(toy.corpus.size()) + " utterances, build (" +
                      std::to_string(spec.count(d::Split::kTrain)) + "," + std::to_string(spec.count(d::Split::kDev)) +
                      "," + std::to_string(spec.count(d::Split::kTest)) + ")");

  std::array<std::vector<d::ManifestEntry>, 3> manifests;
  bool counts_ok = true;
  for (d::Split s : d::kAllSplits) {
    manifests[static_cast<int>(s)] = d::ReadManifestCsv(toy.root / (d::SplitName(s) + ".csv"));
    counts_ok = counts_ok && static_cast<int>(manifests[static_cast<int>(s)].size()) == spec.count(s);
  }
  out.Expect(counts_ok, "manifests hold the requested mixture counts");

  std::array<std::set<std::string>, 3> speakers;
  for (int s = 0; s < 3; ++s) {
    for (const auto& row : manifests[s]) {
      for (const auto& src : row.sources) speakers[s].insert(src.speaker_id);
    }
  }
  bool disjoint = true;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (const auto& spk : speakers[a]) disjoint = disjoint && !speakers[b].count(spk);
    }
  }
  out.Expect(disjoint, "speakers disjoint across splits (" + std::to_string(speakers[0].size()) + "/" +
                           std::to_string(speakers[1].size()) + "/" + std::to_string(speakers[2].size()) + ")");

  std::map<std::string, double> duration;
  int short_in_corpus = 0;
  for (const auto& e : toy.corpus) {
    duration[e.path] = e.duration;
    if (e.duration < spec.min_duration_s) ++short_in_corpus;
  }
  bool long_enough = true;
  for (const auto& rows : manifests) {
    for (const auto& row : rows) {
      for (const auto& src : row.sources) long_enough = long_enough && duration.at(src.source_path) >= spec.min_duration_s;
    }
  }
  out.Expect(long_enough && short_in_corpus > 0,
             "no source shorter than " + Fmt("%.0f", spec.min_duration_s) + " s used (" +
                 std::to_string(short_in_corpus) + " short corpus utterances filtered)");

  bool crops_ok = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  const auto crop_len = static_cast<std::size_t>(std::llround(spec.train_crop_s * tle::dsp::kModelRate));
  for (const auto& row : manifests[0]) {
    crops_ok = crops_ok && std::abs(row.crop_length_s - spec.train_crop_s) < 1e-9;
    for (const auto& src : row.sources) {
      const auto cropped = tle::dsp::ReadWav(toy.root / src.wav);
      const auto full = tle::dsp::Scaled(tle::dsp::Resample(tle::dsp::ReadWav(src.source_path), tle::dsp::kModelRate), src.gain);
      crops_ok = crops_ok && cropped.size() == crop_len;
      min_ratio = std::min(min_ratio, tle::dsp::Rms(cropped.samples) / tle::dsp::Rms(full.samples));
    }
  }
  out.Expect(crops_ok && min_ratio >= spec.activity_ratio,
             "train crops are " + Fmt("%.1f", spec.train_crop_s) + " s, min source RMS ratio " + Fmt("%.3f", min_ratio) +
                 " (threshold " + Fmt("%.2f", spec.activity_ratio) + ")");

  double recon = 0.0;
  for (const auto& rows : manifests) {
    for (const auto& row : rows) {
      const auto rebuilt = d::ReconstructMixture(row);
      const auto written = tle::dsp::ReadWav(toy.root / row.mixture_wav);
      if (rebuilt.size() != written.size()) {
        recon = std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t n = 0; n < rebuilt.size(); ++n) recon = std::max(recon, std::abs(rebuilt.samples[n] - written.samples[n]));
    }
  }
  out.Expect(recon <= 1e-4, "manifest-driven reconstruction, max error " + Fmt("%.2e", recon));

  const fs::path again = WorkDir() / "dataset_b";
  d::BuildDataset(spec, toy.corpus, again);
  std::size_t files = 0;
  const bool identical = SameTree(toy.root, again, files);
  out.Expect(identical, "rebuild with the same seed is byte-identical (" + std::to_string(files) + " files)");
  return out;
}

// ---------------------------------------------------------------------------
// 5. Toy training trend
// ---------------------------------------------------------------------------
Outcome TrainingTrend() {
  namespace tr = tle::train;
  Outcome out;
  const ToyData& toy = SharedToyData();
  const tle::RunConfig& cfg = toy.config;
  const auto train = tr::LoadExamples(toy.root, tle::data::Split::kTrain, cfg.data.target_language,
                                      cfg.train.max_train_examples, cfg.train.segment_s);
  const auto dev = tr::LoadExamples(toy.root, tle::data::Split::kDev, cfg.data.target_language,
                                    cfg.train.max_dev_examples, cfg.train.segment_s);
  out.notes.push_back(std::to_string(train.size()) + " train / " + std::to_string(dev.size()) + " dev mixtures, N_t=" +
                      std::to_string(cfg.model.n_intra_layers));

  tr::TrainConfig stage1 = cfg.train;
  stage1.stage = 1;
  auto model = tr::InitializeModel(cfg.model, stage1, cfg.seed, {});
  const double initial = tr::EvaluateLoss(model, train, 0.0, nullptr).si_snr;
  double reached = initial;
  int epochs1 = 0;
  tr::TrainOptions o1;
  o1.config = stage1;
  o1.seed = cfg.seed;
  o1.out_dir = WorkDir() / "stage1";
  o1.on_epoch = [&](const tr::EpochRecord& rec, tle::model::Extractor& m) {
    epochs1 = rec.epoch;
    reached = tr::EvaluateLoss(m, train, 0.0, nullptr).si_snr;
    return reached < initial + 5.0;
  };
  tr::TrainStage(model, train, dev, nullptr, o1, stage1.lr0);
  out.Expect(reached >= initial + 5.0 && epochs1 <= 200,
             "stage 1 train SI-SNR " + Fmt("%.2f", initial) + " -> " + Fmt("%.2f", reached) + " dB after " +
                 std::to_string(epochs1) + " epochs");

  tr::TrainConfig stage2 = cfg.train;
  stage2.stage = 2;
  stage2.beta_stage2 = 1.0;
  stage2.max_epochs = 50;
  const fs::path init = o1.out_dir / "best.ckpt";
  auto model2 = tr::InitializeModel(cfg.model, stage2, cfg.seed, init);
  const auto spec = tle::supervision::ModelRegistry::Default().Lookup(cfg.supervision.model_id, cfg.supervision.layer_index);
  auto embedder = tle::supervision::CreateEmbedder(spec);
  tr::TrainOptions o2;
  o2.config = stage2;
  o2.seed = cfg.seed;
  o2.out_dir = WorkDir() / "stage2";
  const auto result = tr::TrainStage(model2, train, dev, embedder.get(), o2, tr::InitialLearningRate(stage2, init));

  const auto& start = result.history.front();
  const double mae0 = start.dev_mae.value(), si0 = start.dev_si_snr;
  int first_ok = -1;
  double best_mae = mae0, si_at_best = si0;
  for (std::size_t e = 1; e < result.history.size(); ++e) {
    const auto& rec = result.history[e];
    if (rec.dev_mae.value() < best_mae) {
      best_mae = *rec.dev_mae;
      si_at_best = rec.dev_si_snr;
    }
    if (first_ok < 0 && *rec.dev_mae < mae0 && rec.dev_si_snr >= si0 - 1.0) first_ok = rec.epoch;
  }
  const auto& last = result.history.back();
  out.notes.push_back("stage 2 with " + spec.model_id + ": dev L_MAE " + Fmt("%.3f", mae0) + " -> best " +
                      Fmt("%.3f", best_mae) + " (dev SI-SNR " + Fmt("%.2f", si0) + " -> " + Fmt("%.2f", si_at_best) +
                      "), final epoch " + std::to_string(last.epoch) + " L_MAE " + Fmt("%.3f", *last.dev_mae) +
                      " SI-SNR " + Fmt("%.2f", last.dev_si_snr));
  out.Expect(first_ok > 0 && first_ok <= 50,
             first_ok > 0 ? "stage 2 dev L_MAE below its start value with SI-SNR loss <= 1 dB at epoch " +
                                std::to_string(first_ok)
                          : std::string("stage 2 never lowered dev L_MAE within 1 dB of the starting SI-SNR"));
  return out;
}

// ---------------------------------------------------------------------------
// 6. Schedule semantics
// ---------------------------------------------------------------------------
Outcome ScheduleSuite() {
  namespace tr = tle::train;
  Outcome out;
  const tr::TrainConfig cfg;
  auto trace = [&](const std::vector<double>& losses) {
    auto s = tr::ScheduleState::Start(cfg);
    std::vector<int> halved_at;
    for (std::size_t i = 0; i < losses.size(); ++i) {
      const int before = s.halvings;
      tr::LrScheduleStep(s, losses[i], cfg);
      if (s.halvings != before) halved_at.push_back(static_cast<int>(i));
    }
    return std::make_pair(halved_at, s);
  };
  auto [h1, s1] = trace({5, 4, 3});
  out.Expect(h1.empty() && s1.lr == cfg.lr0, "losses [5,4,3] keep the learning rate");
  auto [h2, s2] = trace({3, 3.1, 3.2, 3.3});
  out.Expect(h2 == std::vector<int>{3} && s2.lr == cfg.lr0 / 2, "losses [3,3.1,3.2,3.3] halve once, after the third non-improving epoch");
  auto [h3, s3] = trace({3, 3.1, 2.9, 3.0, 3.1, 3.2});
  out.Expect(h3 == std::vector<int>{5} && s3.lr == cfg.lr0 / 2, "losses [3,3.1,2.9,3.0,3.1,3.2] halve exactly once, at the end");

  auto s = tr::ScheduleState::Start(cfg);
  tr::LrScheduleStep(s, 1.0, cfg);
  bool early = false;
  for (int i = 0; i < 19; ++i) {
    tr::LrScheduleStep(s, 1.0, cfg);
    early = early || tr::EarlyStopCheck(s, cfg);
  }
  tr::LrScheduleStep(s, 1.0, cfg);
  out.Expect(!early && tr::EarlyStopCheck(s, cfg), "early stop fires exactly at the 20th flat epoch");
  auto r = tr::ScheduleState::Start(cfg);
  tr::LrScheduleStep(r, 1.0, cfg);
  for (int i = 0; i < 19; ++i) tr::LrScheduleStep(r, 1.0, cfg);
  tr::LrScheduleStep(r, 0.5, cfg);
  out.Expect(!tr::EarlyStopCheck(r, cfg) && r.since_improve_stop == 0, "19 flat epochs then an improvement resets the counter");

  // The trainer honours the same rule: with lr = 0 the dev loss never improves.
  tle::model::ModelConfig mc;
  mc.feat_dim = 16;
  mc.n_heads = 2;
  mc.ff_dim = 32;
  mc.n_intra_layers = 1;
  mc.n_inter_layers = 1;
  mc.chunk_len = 20;
  mc.chunk_hop = 10;
  auto net = tle::model::MakeExtractor(mc, 1);
  torch::manual_seed(1);
  std::vector<tr::Example> examples;
  for (int i = 0; i < 3; ++i) {
    auto t = torch::randn({1600});
    examples.push_back({"x" + std::to_string(i), t + 0.3 * torch::randn({1600}), t});
  }
  tr::TrainOptions o;
  o.config.max_epochs = 40;
  o.out_dir = WorkDir() / "schedule";
  const auto result = tr::TrainStage(net, examples, examples, nullptr, o, 0.0);
  out.Expect(result.early_stopped && result.history.back().epoch == 20 && result.schedule.halvings == 6,
             "trainer stops after epoch " + std::to_string(result.history.back().epoch) + " with " +
                 std::to_string(result.schedule.halvings) + " halvings");
  return out;
}

// ---------------------------------------------------------------------------
// 7. Report fidelity
// ---------------------------------------------------------------------------
std::vector<std::string> Cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, '|');) {
    const auto b = cell.find_first_not_of(' '), e = cell.find_last_not_of(' ');
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

Outcome ReportSuite() {
  Outcome out;
  std::vector<tle::eval::MetricsReport> reports;
  for (const char* name : {"test_en_baseline.json", "test_en_mae_supervised.json"}) {
    std::ifstream is(SourceDir() / "tests" / "fixtures" / "reports" / name);
    reports.push_back(tle::eval::MetricsReport::FromJson(nlohmann::json::parse(is)));
  }
  const std::string table = tle::eval::RenderTable(reports);
  std::vector<std::string> lines;
  std::stringstream ss(table);
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  std::cout << table;

  using Row = std::vector<std::string>;
  const bool shape = lines.size() == 4;
  out.Expect(shape, "table has a header, a rule and two data rows (" + std::to_string(lines.size()) + " lines)");
  if (!shape) return out;
  out.Expect(Cells(lines[0]) == Row{"Set", "Target Lang", "Method", "SI-SNR (dB)", "STOI", "PESQ"}, "header columns");
  out.Expect(lines[1].find_first_not_of("=+") == std::string::npos, "header rule");
  out.Expect(Cells(lines[2]) == Row{"test", "English", "baseline", "9.96", "0.82", "1.85"}, "baseline row: " + lines[2]);
  out.Expect(Cells(lines[3]) == Row{"", "", "mae-supervised", "11.18", "0.84", "2.05"}, "supervised row: " + lines[3]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "SI-SNR suite", 10.0, SiSnrSuite},
      {2, "L_MAE suite", 120.0, MaeSuite},
      {3, "architecture suite", 300.0, ArchitectureSuite},
      {4, "dataset suite", 120.0, DatasetSuite},
      {5, "toy training trend", 3 * 3600.0, TrainingTrend},
      {6, "schedule semantics", 120.0, ScheduleSuite},
      {7, "report fidelity", 10.0, ReportSuite},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  torch::set_num_threads(std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
  bool all = true;
  std::vector<std::string> summary;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.Expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.Expect(secs <= c.budget_s, "runtime " + Fmt("%.1f", secs) + " s within " + Fmt("%.0f", c.budget_s) + " s");
    for (const auto& n : o.notes) std::cout << "    [" << c.id << "] " << n << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%s  criterion %d: %s (%.1f s)", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    std::cout << line << std::endl;
    summary.push_back(line);
    all = all && o.pass;
  }
  std::cout << "\nsummary\n";
  for (const auto& s : summary) std::cout << s << "\n";
  std::error_code ec;
  fs::remove_all(WorkDir(), ec);
  return all ? 0 : 1;
}
