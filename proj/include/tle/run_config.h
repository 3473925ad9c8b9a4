// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_RUN_CONFIG_H_
#define TLE_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tle/data/spec.h"
#include "tle/eval/evaluate.h"
#include "tle/model/config.h"
#include "tle/train/schedule.h"

namespace tle {

struct SupervisionConfig {
  std::string model_id = "mhubert-147";
  int layer_index = -1;  // -1: final layer of the chosen model
  std::string registry;  // empty: bundled registry

  nlohmann::json ToJson() const;
  static SupervisionConfig FromJson(const nlohmann::json& j);
};

struct DataConfig {
  data::DatasetSpec spec;  // spec.seed mirrors RunConfig::seed
  std::string corpus;      // corpus TSV for build-data
  std::string root;        // dataset directory with {split}.csv and audio/
  std::string target_language = "en";

  nlohmann::json ToJson() const;
  static DataConfig FromJson(const nlohmann::json& j);
};

// Every section of a run: defaults < config file < dotted overrides.
struct RunConfig {
  uint64_t seed = 0;
  model::ModelConfig model;
  train::TrainConfig train;
  SupervisionConfig supervision;
  DataConfig data;
  eval::EvalConfig eval;

  nlohmann::json ToJson() const;
  static RunConfig FromJson(const nlohmann::json& j);

  static RunConfig Resolve(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                           std::optional<uint64_t> seed = std::nullopt);
};

}  // namespace tle

#endif  // TLE_RUN_CONFIG_H_
