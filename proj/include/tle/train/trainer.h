// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_TRAIN_TRAINER_H_
#define TLE_TRAIN_TRAINER_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "tle/data/spec.h"
#include "tle/model/extractor.h"
#include "tle/supervision/embedder.h"
#include "tle/train/schedule.h"
#include "tle/util/error.h"
#include "tle/util/tensor_file.h"

namespace tle::train {

// Raised when a loss turns non-finite. The last checkpoint on disk is left
// untouched.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

struct Example {
  std::string id;
  torch::Tensor mixture;  // [L] float32
  torch::Tensor target;   // [L] float32
};

// Reads mixture and target-language source WAVs listed in `<root>/<split>.csv`.
// `limit` > 0 keeps the first rows only. `segment_s` > 0 cuts each example to
// the window of that length where both the target and the interference are
// most active.
std::vector<Example> LoadExamples(const std::filesystem::path& root, data::Split split,
                                  const std::string& target_language, int limit = 0, double segment_s = 0.0);

struct EpochRecord {
  int epoch = 0;
  std::optional<double> train_loss;  // absent for the pre-training evaluation
  double dev_loss = 0.0;
  double lr = 0.0;
  double beta = 0.0;
  double wall_time = 0.0;  // seconds since the stage started
  std::optional<double> train_si_snr;
  double dev_si_snr = 0.0;
  std::optional<double> dev_mae;

  nlohmann::json ToJson() const;
};

struct TrainOptions {
  TrainConfig config;
  uint64_t seed = 0;
  std::filesystem::path out_dir;
  // Extra fields stored with the training state in every checkpoint.
  nlohmann::json provenance = nlohmann::json::object();
  // Return false to end the stage after the given epoch.
  std::function<bool(const EpochRecord&, model::Extractor&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochRecord> history;  // epoch 0 is the evaluation before any update
  ScheduleState schedule;
  bool early_stopped = false;
};

// Stage 1 draws fresh parameters from `seed`. Stage 2 loads `init_checkpoint`,
// whose architecture must equal `cfg`.
model::Extractor InitializeModel(const model::ModelConfig& cfg, const TrainConfig& train, uint64_t seed,
                                 const std::filesystem::path& init_checkpoint);

// Learning rate a stage starts from: lr0, or the rate a stage-1 checkpoint
// ended with when restart_lr is off.
double InitialLearningRate(const TrainConfig& train, const std::filesystem::path& init_checkpoint);

// Mean combined loss, SI-SNR and (with an embedder) L_MAE over `examples`.
struct DevMetrics {
  double loss = 0.0;
  double si_snr = 0.0;
  std::optional<double> mae;
};
DevMetrics EvaluateLoss(model::Extractor& model, const std::vector<Example>& examples, double beta,
                        const supervision::SpeechEmbedder* embedder);

// Adam moments and step counts, named after the model parameters.
NamedTensors OptimizerState(torch::optim::Adam& optimizer, model::Extractor& model);

// Runs one training stage and writes best.ckpt, last.ckpt and history.jsonl
// into options.out_dir. `embedder` is only consulted when beta > 0.
TrainResult TrainStage(model::Extractor& model, const std::vector<Example>& train_set,
                       const std::vector<Example>& dev_set, const supervision::SpeechEmbedder* embedder,
                       const TrainOptions& options, double initial_lr);

}  // namespace tle::train

#endif  // TLE_TRAIN_TRAINER_H_
