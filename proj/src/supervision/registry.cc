// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/supervision/registry.h"

#include <cstdlib>
#include <fstream>

#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace tle::supervision {

ModelRegistry ModelRegistry::Load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open model registry ", path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    Fail("model registry ", path, ": ", e.what());
  }
  ModelRegistry reg;
  reg.default_model_ = j.value("default", "");
  for (const auto& [id, entry] : j.at("models").items()) {
    EmbeddingModelSpec s;
    s.model_id = id;
    nlohmann::json builtin;
    JsonReader(entry, "registry." + id)
        .Field("backend", s.backend)
        .Field("source", s.source)
        .Field("file", s.file)
        .Field("num_layers", s.num_layers)
        .Field("feature_dim", s.feature_dim)
        .Field("expected_rate", s.expected_rate)
        .Field("normalize_waveform", s.normalize_waveform)
        .Field("hidden_state", s.hidden_state)
        .Field("builtin", builtin)
        .Finish();
    if (s.backend != "builtin" && s.backend != "torchscript") {
      Fail("registry.", id, ": unknown backend '", s.backend, "'");
    }
    if (s.expected_rate != dsp::kModelRate) {
      Fail("registry.", id, ": expected_rate must be ", dsp::kModelRate);
    }
    if (s.backend == "builtin") s.arch = BuiltinArch::FromJson(builtin.is_null() ? nlohmann::json::object() : builtin);
    if (s.backend == "torchscript" && s.file.empty()) Fail("registry.", id, ": torchscript entry needs 'file'");
    s.layer_index = s.num_layers;
    reg.entries_[id] = s;
  }
  if (!reg.default_model_.empty() && !reg.Contains(reg.default_model_)) {
    Fail("model registry default '", reg.default_model_, "' is not a registered model");
  }
  return reg;
}

std::filesystem::path ModelRegistry::DefaultPath() {
  if (const char* env = std::getenv("TLE_MODEL_REGISTRY"); env && *env) return env;
  return std::filesystem::path(TLE_SOURCE_DIR) / "models" / "registry.json";
}

ModelRegistry ModelRegistry::Default() { return Load(DefaultPath()); }

EmbeddingModelSpec ModelRegistry::Lookup(const std::string& model_id, int layer_index) const {
  auto it = entries_.find(model_id);
  if (it == entries_.end()) Fail("unknown embedding model '", model_id, "'");
  EmbeddingModelSpec s = it->second;
  if (layer_index >= 0) {
    if (layer_index > s.num_layers) {
      Fail("layer_index ", layer_index, " invalid for '", model_id, "' with ", s.num_layers, " layers");
    }
    s.layer_index = layer_index;
  }
  return s;
}

std::filesystem::path ModelCacheDir() {
  if (const char* env = std::getenv("TLE_MODEL_CACHE"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "tle" / "models";
  }
  return ".tle_models";
}

std::unique_ptr<SpeechEmbedder> CreateEmbedder(const EmbeddingModelSpec& spec,
                                               const std::filesystem::path& cache_dir) {
  if (spec.backend == "builtin") return MakeBuiltinEmbedder(spec);
  const std::filesystem::path file = std::filesystem::path(spec.file).is_absolute()
                                         ? std::filesystem::path(spec.file)
                                         : cache_dir / spec.file;
  if (!std::filesystem::exists(file)) {
    Fail("failed to load embedding model '", spec.model_id, "': ", file,
         " not found (export it with tools/export_embedder.py ", spec.model_id, ")");
  }
  return LoadTorchScriptEmbedder(spec, file.string());
}

}  // namespace tle::supervision
