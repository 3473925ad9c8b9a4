// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_TRAIN_SCHEDULE_H_
#define TLE_TRAIN_SCHEDULE_H_

#include <limits>
#include <string>

#include <nlohmann/json.hpp>

namespace tle::train {

struct TrainConfig {
  double lr0 = 3e-4;
  int batch_size = 2;
  int plateau_patience = 3;    // epochs without improvement before halving
  double halving_factor = 0.5;
  int stop_patience = 20;      // epochs without improvement before stopping
  double grad_clip = 5.0;      // global norm; <= 0 disables clipping
  int max_epochs = 200;
  int stage = 1;
  double beta_stage2 = 1.0;
  bool restart_lr = true;      // stage 2 starts again from lr0
  double segment_s = 0.0;      // > 0 shortens every training example
  int max_train_examples = 0;  // 0 keeps the whole manifest
  int max_dev_examples = 0;
  bool shuffle = true;

  // Weight of the embedding loss for the configured stage.
  double beta() const { return stage == 1 ? 0.0 : beta_stage2; }

  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct ScheduleState {
  int epoch = 0;
  double lr = 0.0;
  int halvings = 0;
  double best_dev_loss = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int since_improve_lr = 0;
  int since_improve_stop = 0;

  static ScheduleState Start(const TrainConfig& cfg);
  nlohmann::json ToJson() const;
  static ScheduleState FromJson(const nlohmann::json& j);
};

// Records one epoch's dev loss. Returns true when it is a new best. A loss
// only counts as an improvement when strictly below the best so far.
bool LrScheduleStep(ScheduleState& state, double dev_loss, const TrainConfig& cfg);

bool EarlyStopCheck(const ScheduleState& state, const TrainConfig& cfg);

}  // namespace tle::train

#endif  // TLE_TRAIN_SCHEDULE_H_
