// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_MODEL_CONFIG_H_
#define TLE_MODEL_CONFIG_H_

#include <cstdint>

#include <nlohmann/json.hpp>

namespace tle::model {

// Architecture of the dual-path extractor. Defaults give the full-size
// model (8-layer intra/inter transformers, one dual-path block).
struct ModelConfig {
  int enc_kernel = 16;       // samples
  int enc_stride = 8;        // samples
  int feat_dim = 256;
  int chunk_len = 250;       // frames
  int chunk_hop = 125;       // frames
  int n_heads = 8;
  int n_intra_layers = 8;
  int n_inter_layers = 8;
  int n_dual_blocks = 1;
  int ff_dim = 1024;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);

  // Encoder frames produced for `samples` input samples.
  int64_t NumFrames(int64_t samples) const;
  // Chunks needed to cover `frames` frames after right padding.
  int64_t NumChunks(int64_t frames) const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace tle::model

#endif  // TLE_MODEL_CONFIG_H_
