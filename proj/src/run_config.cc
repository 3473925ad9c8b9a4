// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/run_config.h"

#include "tle/util/config.h"
#include "tle/util/json_fields.h"

namespace tle {

nlohmann::json SupervisionConfig::ToJson() const {
  return {{"model_id", model_id}, {"layer_index", layer_index}, {"registry", registry}};
}

SupervisionConfig SupervisionConfig::FromJson(const nlohmann::json& j) {
  SupervisionConfig c;
  JsonReader(j, "supervision")
      .Field("model_id", c.model_id)
      .Field("layer_index", c.layer_index)
      .Field("registry", c.registry)
      .Finish();
  return c;
}

nlohmann::json DataConfig::ToJson() const {
  nlohmann::json j = spec.ToJson();
  j.erase("seed");
  j["corpus"] = corpus;
  j["root"] = root;
  j["target_language"] = target_language;
  return j;
}

DataConfig DataConfig::FromJson(const nlohmann::json& j) {
  DataConfig c;
  nlohmann::json rest = j;
  for (const char* key : {"corpus", "root", "target_language"}) {
    if (auto it = rest.find(key); it != rest.end()) {
      if (!it->is_string()) Fail("data.", key, " must be a string");
      (key == std::string("corpus") ? c.corpus : key == std::string("root") ? c.root : c.target_language) =
          it->get<std::string>();
      rest.erase(key);
    }
  }
  if (rest.contains("seed")) Fail("data.seed is not configurable; set the top-level seed instead");
  c.spec = data::DatasetSpec::FromJson(rest);
  return c;
}

nlohmann::json RunConfig::ToJson() const {
  return {{"seed", seed},
          {"model", model.ToJson()},
          {"train", train.ToJson()},
          {"supervision", supervision.ToJson()},
          {"data", data.ToJson()},
          {"eval", eval.ToJson()}};
}

RunConfig RunConfig::FromJson(const nlohmann::json& j) {
  RunConfig c;
  nlohmann::json m = c.model.ToJson(), t = c.train.ToJson(), s = c.supervision.ToJson(), d = c.data.ToJson(),
                 e = c.eval.ToJson();
  JsonReader(j, "config")
      .Field("seed", c.seed)
      .Field("model", m)
      .Field("train", t)
      .Field("supervision", s)
      .Field("data", d)
      .Field("eval", e)
      .Finish();
  c.model = model::ModelConfig::FromJson(m);
  c.train = train::TrainConfig::FromJson(t);
  c.supervision = SupervisionConfig::FromJson(s);
  c.data = DataConfig::FromJson(d);
  c.data.spec.seed = c.seed;
  c.eval = eval::EvalConfig::FromJson(e);
  return c;
}

RunConfig RunConfig::Resolve(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                             std::optional<uint64_t> seed) {
  nlohmann::json j = ResolveConfig(RunConfig().ToJson(), file, overrides);
  if (seed) j["seed"] = *seed;
  return FromJson(j);
}

}  // namespace tle
