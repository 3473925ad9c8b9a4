// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_SUPERVISION_REGISTRY_H_
#define TLE_SUPERVISION_REGISTRY_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "tle/supervision/embedder.h"

namespace tle::supervision {

// model_id -> how to obtain and read a frozen speech model.
class ModelRegistry {
 public:
  static ModelRegistry Load(const std::filesystem::path& path);
  // The registry shipped in models/registry.json.
  static ModelRegistry Default();
  static std::filesystem::path DefaultPath();

  // layer_index < 0 selects the final layer.
  EmbeddingModelSpec Lookup(const std::string& model_id, int layer_index = -1) const;
  bool Contains(const std::string& model_id) const { return entries_.count(model_id) > 0; }
  const std::string& default_model() const { return default_model_; }

 private:
  std::map<std::string, EmbeddingModelSpec> entries_;
  std::string default_model_;
};

// Directory holding exported models: $TLE_MODEL_CACHE, else ~/.cache/tle/models.
std::filesystem::path ModelCacheDir();

std::unique_ptr<SpeechEmbedder> CreateEmbedder(const EmbeddingModelSpec& spec,
                                               const std::filesystem::path& cache_dir = ModelCacheDir());

}  // namespace tle::supervision

#endif  // TLE_SUPERVISION_REGISTRY_H_
