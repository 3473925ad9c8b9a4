// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/model/checkpoint.h"

#include <map>

#include "tle/util/error.h"

namespace tle::model {

namespace {
constexpr const char* kParamPrefix = "model/";
constexpr const char* kOptimPrefix = "optim/";
}  // namespace

NamedTensors ParametersOf(Extractor& model) {
  NamedTensors out;
  for (const auto& item : model->named_parameters()) out.emplace_back(item.key(), item.value());
  return out;
}

void SaveCheckpoint(const std::filesystem::path& path, Extractor& model,
                    const nlohmann::json& train_state, const NamedTensors& optimizer) {
  NamedTensors tensors;
  for (auto& [name, t] : ParametersOf(model)) tensors.emplace_back(kParamPrefix + name, t);
  for (const auto& [name, t] : optimizer) tensors.emplace_back(kOptimPrefix + name, t);
  nlohmann::json meta = {{"format", "tle-checkpoint"},
                         {"version", kCheckpointVersion},
                         {"model_config", model->config().ToJson()},
                         {"train_state", train_state}};
  WriteTensorFile(path, meta, tensors);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  TensorFile file = ReadTensorFile(path);
  if (file.meta.value("format", "") != "tle-checkpoint") {
    Fail(path, " is not an extractor checkpoint");
  }
  if (file.meta.value("version", 0) != kCheckpointVersion) {
    Fail(path, ": unsupported checkpoint version ", file.meta.value("version", 0));
  }
  Checkpoint ckpt;
  ckpt.config = ModelConfig::FromJson(file.meta.at("model_config"));
  ckpt.train_state = file.meta.value("train_state", nlohmann::json());
  const std::string param_prefix = kParamPrefix, optim_prefix = kOptimPrefix;
  for (auto& [name, t] : file.tensors) {
    if (name.starts_with(param_prefix)) {
      ckpt.params.emplace_back(name.substr(param_prefix.size()), std::move(t));
    } else if (name.starts_with(optim_prefix)) {
      ckpt.optimizer.emplace_back(name.substr(optim_prefix.size()), std::move(t));
    }
  }
  return ckpt;
}

void LoadParameters(Extractor& model, const NamedTensors& params) {
  std::map<std::string, torch::Tensor> by_name(params.begin(), params.end());
  torch::NoGradGuard no_grad;
  auto named = model->named_parameters();
  if (named.size() != by_name.size()) {
    Fail("checkpoint holds ", by_name.size(), " parameters but the model has ", named.size());
  }
  for (auto& item : named) {
    auto it = by_name.find(item.key());
    if (it == by_name.end()) Fail("checkpoint is missing parameter ", item.key());
    if (it->second.sizes() != item.value().sizes()) {
      Fail("shape mismatch for ", item.key(), ": checkpoint ", it->second.sizes(), ", model ",
           item.value().sizes());
    }
    item.value().copy_(it->second);
  }
}

Extractor ExtractorFromCheckpoint(const Checkpoint& ckpt) {
  Extractor model(ckpt.config);
  LoadParameters(model, ckpt.params);
  model->eval();
  return model;
}

}  // namespace tle::model
