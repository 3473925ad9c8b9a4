// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_MODEL_CHECKPOINT_H_
#define TLE_MODEL_CHECKPOINT_H_

#include <filesystem>

#include <nlohmann/json.hpp>

#include "tle/model/extractor.h"
#include "tle/util/tensor_file.h"

namespace tle::model {

inline constexpr int kCheckpointVersion = 1;

// Model parameters and architecture, plus optional training state. The
// architecture is stored as JSON so evaluation can rebuild it exactly.
struct Checkpoint {
  ModelConfig config;
  NamedTensors params;
  nlohmann::json train_state;  // null when absent
  NamedTensors optimizer;
};

NamedTensors ParametersOf(Extractor& model);

void SaveCheckpoint(const std::filesystem::path& path, Extractor& model,
                    const nlohmann::json& train_state = nullptr,
                    const NamedTensors& optimizer = {});

Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Copies checkpoint parameters into `model`; names and shapes must match.
void LoadParameters(Extractor& model, const NamedTensors& params);

// Rebuilds the extractor described by a checkpoint, in eval mode.
Extractor ExtractorFromCheckpoint(const Checkpoint& ckpt);

}  // namespace tle::model

#endif  // TLE_MODEL_CHECKPOINT_H_
