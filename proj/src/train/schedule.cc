// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/train/schedule.h"

#include <cmath>

#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace tle::train {

void TrainConfig::Validate() const {
  TLE_CHECK(lr0 > 0.0, "train.lr0 must be positive");
  TLE_CHECK(batch_size >= 1, "train.batch_size must be at least 1");
  TLE_CHECK(plateau_patience >= 1 && stop_patience >= 1, "train patiences must be at least 1");
  TLE_CHECK(halving_factor > 0.0 && halving_factor < 1.0, "train.halving_factor must lie in (0, 1)");
  TLE_CHECK(max_epochs >= 1, "train.max_epochs must be at least 1");
  TLE_CHECK(stage == 1 || stage == 2, "train.stage must be 1 or 2");
  TLE_CHECK(beta_stage2 >= 0.0, "train.beta_stage2 must be non-negative");
  TLE_CHECK(segment_s >= 0.0, "train.segment_s must be non-negative");
  TLE_CHECK(max_train_examples >= 0 && max_dev_examples >= 0, "example limits must be non-negative");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"lr0", lr0},
          {"batch_size", batch_size},
          {"plateau_patience", plateau_patience},
          {"halving_factor", halving_factor},
          {"stop_patience", stop_patience},
          {"grad_clip", grad_clip},
          {"max_epochs", max_epochs},
          {"stage", stage},
          {"beta_stage2", beta_stage2},
          {"restart_lr", restart_lr},
          {"segment_s", segment_s},
          {"max_train_examples", max_train_examples},
          {"max_dev_examples", max_dev_examples},
          {"shuffle", shuffle}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  JsonReader(j, "train")
      .Field("lr0", c.lr0)
      .Field("batch_size", c.batch_size)
      .Field("plateau_patience", c.plateau_patience)
      .Field("halving_factor", c.halving_factor)
      .Field("stop_patience", c.stop_patience)
      .Field("grad_clip", c.grad_clip)
      .Field("max_epochs", c.max_epochs)
      .Field("stage", c.stage)
      .Field("beta_stage2", c.beta_stage2)
      .Field("restart_lr", c.restart_lr)
      .Field("segment_s", c.segment_s)
      .Field("max_train_examples", c.max_train_examples)
      .Field("max_dev_examples", c.max_dev_examples)
      .Field("shuffle", c.shuffle)
      .Finish();
  c.Validate();
  return c;
}

ScheduleState ScheduleState::Start(const TrainConfig& cfg) {
  ScheduleState s;
  s.lr = cfg.lr0;
  return s;
}

nlohmann::json ScheduleState::ToJson() const {
  return {{"epoch", epoch},
          {"lr", lr},
          {"halvings", halvings},
          {"best_dev_loss", std::isfinite(best_dev_loss) ? nlohmann::json(best_dev_loss) : nlohmann::json()},
          {"best_epoch", best_epoch},
          {"since_improve_lr", since_improve_lr},
          {"since_improve_stop", since_improve_stop}};
}

ScheduleState ScheduleState::FromJson(const nlohmann::json& j) {
  ScheduleState s;
  nlohmann::json best;
  JsonReader(j, "schedule")
      .Field("epoch", s.epoch)
      .Field("lr", s.lr)
      .Field("halvings", s.halvings)
      .Field("best_dev_loss", best)
      .Field("best_epoch", s.best_epoch)
      .Field("since_improve_lr", s.since_improve_lr)
      .Field("since_improve_stop", s.since_improve_stop)
      .Finish();
  if (!best.is_null()) s.best_dev_loss = best.get<double>();
  return s;
}

bool LrScheduleStep(ScheduleState& state, double dev_loss, const TrainConfig& cfg) {
  ++state.epoch;
  if (dev_loss < state.best_dev_loss) {
    state.best_dev_loss = dev_loss;
    state.best_epoch = state.epoch;
    state.since_improve_lr = 0;
    state.since_improve_stop = 0;
    return true;
  }
  ++state.since_improve_stop;
  if (++state.since_improve_lr >= cfg.plateau_patience) {
    state.lr *= cfg.halving_factor;
    ++state.halvings;
    state.since_improve_lr = 0;
  }
  return false;
}

bool EarlyStopCheck(const ScheduleState& state, const TrainConfig& cfg) {
  return state.since_improve_stop >= cfg.stop_patience;
}

}  // namespace tle::train
