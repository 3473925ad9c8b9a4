// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/train/trainer.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tle/data/manifest.h"
#include "tle/dsp/si_snr.h"
#include "tle/dsp/wav_io.h"
#include "tle/model/checkpoint.h"
#include "tle/supervision/losses.h"
#include "tle/util/rng.h"

namespace tle::train {

namespace {

double WindowRatio(const std::vector<double>& x, std::size_t offset, std::size_t length, double full_rms) {
  if (full_rms <= 0.0) return 0.0;
  return dsp::Rms(std::span<const double>(x).subspan(offset, length)) / full_rms;
}

torch::Tensor ToTensor(const std::vector<double>& x, std::size_t offset, std::size_t length) {
  std::vector<float> f(x.begin() + offset, x.begin() + offset + length);
  return torch::tensor(f, torch::kFloat32);
}

bool Finite(double v) { return std::isfinite(v); }

void AppendHistory(const std::filesystem::path& path, const EpochRecord& r) {
  std::ofstream os(path, std::ios::app);
  if (!os) Fail("cannot append to ", path);
  os << r.ToJson().dump() << '\n';
}

}  // namespace

std::vector<Example> LoadExamples(const std::filesystem::path& root, data::Split split,
                                  const std::string& target_language, int limit, double segment_s) {
  const std::filesystem::path manifest = root / (data::SplitName(split) + ".csv");
  std::vector<data::ManifestEntry> rows = data::ReadManifestCsv(manifest);
  if (limit > 0 && static_cast<std::size_t>(limit) < rows.size()) rows.resize(limit);
  if (rows.empty()) Fail(manifest, " lists no mixtures");

  std::vector<std::string> missing;
  for (const auto& row : rows) {
    if (!std::filesystem::exists(root / row.mixture_wav)) missing.push_back(row.mixture_id);
    else if (!std::filesystem::exists(root / row.source(target_language).wav)) missing.push_back(row.mixture_id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    Fail("missing audio under ", root, " for: ", ids);
  }

  std::vector<Example> out;
  for (const auto& row : rows) {
    const dsp::Waveform mix = dsp::ReadWav(root / row.mixture_wav);
    const dsp::Waveform tgt = dsp::ReadWav(root / row.source(target_language).wav);
    if (mix.sample_rate != dsp::kModelRate || tgt.sample_rate != dsp::kModelRate || mix.size() != tgt.size()) {
      Fail("mixture ", row.mixture_id, ": mixture and target must share length and a 16 kHz rate");
    }
    std::size_t offset = 0, length = mix.size();
    const auto seg = static_cast<std::size_t>(std::llround(segment_s * dsp::kModelRate));
    if (seg > 0 && seg < mix.size()) {
      std::vector<double> interference(mix.size());
      for (std::size_t n = 0; n < mix.size(); ++n) interference[n] = mix.samples[n] - tgt.samples[n];
      const double rms_t = dsp::Rms(tgt.samples), rms_i = dsp::Rms(interference);
      const std::size_t hop = dsp::kModelRate / 10;
      double best = -1.0;
      for (std::size_t o = 0; o + seg <= mix.size(); o += hop) {
        const double r = std::min(WindowRatio(tgt.samples, o, seg, rms_t), WindowRatio(interference, o, seg, rms_i));
        if (r > best) {
          best = r;
          offset = o;
        }
      }
      length = seg;
    }
    out.push_back({row.mixture_id, ToTensor(mix.samples, offset, length), ToTensor(tgt.samples, offset, length)});
  }
  return out;
}

nlohmann::json EpochRecord::ToJson() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"epoch", epoch},       {"train_loss", opt(train_loss)},     {"dev_loss", dev_loss},
          {"lr", lr},             {"beta", beta},                      {"wall_time", wall_time},
          {"train_si_snr", opt(train_si_snr)}, {"dev_si_snr", dev_si_snr}, {"dev_mae", opt(dev_mae)}};
}

model::Extractor InitializeModel(const model::ModelConfig& cfg, const TrainConfig& train, uint64_t seed,
                                 const std::filesystem::path& init_checkpoint) {
  if (init_checkpoint.empty()) {
    if (train.stage == 2) Fail("stage 2 needs a stage-1 checkpoint to start from");
    return model::MakeExtractor(cfg, seed);
  }
  const model::Checkpoint ckpt = model::LoadCheckpoint(init_checkpoint);
  if (!(ckpt.config == cfg)) {
    Fail("model config ", cfg.ToJson().dump(), " differs from the checkpoint's ", ckpt.config.ToJson().dump());
  }
  model::Extractor m = model::ExtractorFromCheckpoint(ckpt);
  m->train();
  return m;
}

double InitialLearningRate(const TrainConfig& train, const std::filesystem::path& init_checkpoint) {
  if (train.restart_lr || init_checkpoint.empty()) return train.lr0;
  const model::Checkpoint ckpt = model::LoadCheckpoint(init_checkpoint);
  const auto& state = ckpt.train_state;
  if (!state.is_object() || !state.contains("schedule")) {
    Fail(init_checkpoint, " carries no schedule state to continue the learning rate from");
  }
  return ScheduleState::FromJson(state.at("schedule")).lr;
}

DevMetrics EvaluateLoss(model::Extractor& model, const std::vector<Example>& examples, double beta,
                        const supervision::SpeechEmbedder* embedder) {
  TLE_CHECK(!examples.empty(), "no examples to evaluate");
  torch::NoGradGuard no_grad;
  const bool was_training = model->is_training();
  model->eval();
  double loss = 0.0, si_snr = 0.0, mae = 0.0;
  for (const auto& ex : examples) {
    torch::Tensor est = model->forward(ex.mixture.unsqueeze(0));
    auto terms = supervision::CombinedLoss(ex.target.unsqueeze(0), est, {beta}, embedder);
    loss += terms.total.item<double>();
    si_snr -= terms.si_snr_loss.item<double>();
    if (terms.mae) mae += terms.mae->item<double>();
  }
  model->train(was_training);
  const double n = static_cast<double>(examples.size());
  DevMetrics m{loss / n, si_snr / n, std::nullopt};
  if (beta > 0.0) m.mae = mae / n;
  return m;
}

NamedTensors OptimizerState(torch::optim::Adam& optimizer, model::Extractor& model) {
  NamedTensors out;
  auto& state = optimizer.state();
  for (const auto& item : model->named_parameters()) {
    auto it = state.find(item.value().unsafeGetTensorImpl());
    if (it == state.end()) continue;
    auto& s = static_cast<torch::optim::AdamParamState&>(*it->second);
    out.emplace_back(item.key() + "/exp_avg", s.exp_avg());
    out.emplace_back(item.key() + "/exp_avg_sq", s.exp_avg_sq());
    out.emplace_back(item.key() + "/step", torch::tensor(static_cast<int64_t>(s.step()), torch::kInt64));
  }
  return out;
}

TrainResult TrainStage(model::Extractor& model, const std::vector<Example>& train_set,
                       const std::vector<Example>& dev_set, const supervision::SpeechEmbedder* embedder,
                       const TrainOptions& options, double initial_lr) {
  const TrainConfig& cfg = options.config;
  cfg.Validate();
  TLE_CHECK(!train_set.empty() && !dev_set.empty(), "training needs train and dev examples");
  TLE_CHECK(initial_lr >= 0.0, "initial learning rate must be non-negative");
  const double beta = cfg.beta();
  if (beta > 0.0 && embedder == nullptr) Fail("stage ", cfg.stage, " with beta ", beta, " needs an embedding model");
  const supervision::SpeechEmbedder* used_embedder = beta > 0.0 ? embedder : nullptr;

  std::filesystem::create_directories(options.out_dir);
  const auto history_path = options.out_dir / "history.jsonl";
  const auto best_path = options.out_dir / "best.ckpt";
  const auto last_path = options.out_dir / "last.ckpt";
  std::ofstream(history_path, std::ios::trunc);

  torch::manual_seed(options.seed);
  model->train();
  torch::optim::Adam optimizer(model->parameters(),
                               torch::optim::AdamOptions(initial_lr).betas({0.9, 0.999}).eps(1e-8).weight_decay(0));
  TrainResult result;
  result.schedule = ScheduleState::Start(cfg);
  result.schedule.lr = initial_lr;
  ScheduleState& state = result.schedule;

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto train_state = [&] {
    nlohmann::json j = options.provenance.is_object() ? options.provenance : nlohmann::json::object();
    j.update({{"stage", cfg.stage}, {"beta", beta}, {"seed", options.seed}, {"schedule", state.ToJson()}});
    return j;
  };
  auto diverged = [&](const std::string& where) {
    throw DivergenceError("training diverged: non-finite loss " + where + "; last good checkpoint kept at " +
                          last_path.string());
  };

  const DevMetrics dev0 = EvaluateLoss(model, dev_set, beta, used_embedder);
  if (!Finite(dev0.loss)) diverged("on the initial dev evaluation");
  EpochRecord rec0;
  rec0.dev_loss = dev0.loss;
  rec0.lr = state.lr;
  rec0.beta = beta;
  rec0.wall_time = elapsed();
  rec0.dev_si_snr = dev0.si_snr;
  rec0.dev_mae = dev0.mae;
  result.history.push_back(rec0);
  AppendHistory(history_path, rec0);
  state.best_dev_loss = dev0.loss;
  state.best_epoch = 0;
  model::SaveCheckpoint(best_path, model, train_state());
  model::SaveCheckpoint(last_path, model, train_state(), OptimizerState(optimizer, model));

  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle) Rng(DeriveSeed(options.seed, "shuffle", static_cast<uint64_t>(epoch))).Shuffle(order);
    const double epoch_lr = state.lr;
    for (auto& group : optimizer.param_groups()) {
      static_cast<torch::optim::AdamOptions&>(group.options()).lr(epoch_lr);
    }

    model->train();
    double loss_sum = 0.0, si_snr_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_size));
      bool same_length = true;
      for (std::size_t i = b; i < end; ++i) {
        same_length &= train_set[order[i]].mixture.size(0) == train_set[order[b]].mixture.size(0);
      }
      optimizer.zero_grad();
      std::vector<torch::Tensor> totals, si_losses;
      if (same_length) {
        std::vector<torch::Tensor> mixes, targets;
        for (std::size_t i = b; i < end; ++i) {
          mixes.push_back(train_set[order[i]].mixture);
          targets.push_back(train_set[order[i]].target);
        }
        auto terms = supervision::CombinedLoss(torch::stack(targets), model->forward(torch::stack(mixes)), {beta},
                                               used_embedder);
        totals.push_back(terms.total);
        si_losses.push_back(terms.si_snr_loss);
      } else {
        for (std::size_t i = b; i < end; ++i) {
          const Example& ex = train_set[order[i]];
          auto terms = supervision::CombinedLoss(ex.target.unsqueeze(0), model->forward(ex.mixture.unsqueeze(0)),
                                                 {beta}, used_embedder);
          totals.push_back(terms.total);
          si_losses.push_back(terms.si_snr_loss);
        }
      }
      torch::Tensor total = torch::cat(totals);
      torch::Tensor loss = total.mean();
      const double loss_value = loss.item<double>();
      if (!Finite(loss_value)) diverged("at epoch " + std::to_string(epoch));
      loss.backward();
      if (cfg.grad_clip > 0.0) torch::nn::utils::clip_grad_norm_(model->parameters(), cfg.grad_clip);
      optimizer.step();
      loss_sum += total.sum().item<double>();
      si_snr_sum -= torch::cat(si_losses).sum().item<double>();
    }

    const DevMetrics dev = EvaluateLoss(model, dev_set, beta, used_embedder);
    if (!Finite(dev.loss)) diverged("on dev after epoch " + std::to_string(epoch));
    const bool improved = LrScheduleStep(state, dev.loss, cfg);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.dev_loss = dev.loss;
    rec.lr = epoch_lr;
    rec.beta = beta;
    rec.wall_time = elapsed();
    rec.train_si_snr = si_snr_sum / static_cast<double>(train_set.size());
    rec.dev_si_snr = dev.si_snr;
    rec.dev_mae = dev.mae;
    result.history.push_back(rec);
    AppendHistory(history_path, rec);
    if (improved) model::SaveCheckpoint(best_path, model, train_state());
    model::SaveCheckpoint(last_path, model, train_state(), OptimizerState(optimizer, model));

    if (options.on_epoch && !options.on_epoch(rec, model)) break;
    if (EarlyStopCheck(state, cfg)) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace tle::train
