// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/data/spec.h"

#include <map>

#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace tle::data {

std::string SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  Fail("unknown split '", name, "' (expected train, dev or test)");
}

void DatasetSpec::Validate() const {
  if (languages[0].empty() || languages[1].empty() || languages[0] == languages[1]) {
    Fail("dataset: need two distinct languages");
  }
  for (Split s : kAllSplits) {
    if (count(s) <= 0) Fail("dataset: count for ", SplitName(s), " must be > 0");
  }
  if (min_duration_s < 0.0) Fail("dataset: min_duration_s must be >= 0");
  if (train_crop_s <= 0.0) Fail("dataset: train_crop_s must be > 0");
  if (lufs_min > lufs_max) Fail("dataset: lufs_min exceeds lufs_max");
  if (peak_limit <= 0.0 || peak_limit > 1.0) Fail("dataset: peak_limit must be in (0, 1]");
  if (activity_ratio < 0.0) Fail("dataset: activity_ratio must be >= 0");
  if (crop_retries < 1) Fail("dataset: crop_retries must be >= 1");
}

nlohmann::json DatasetSpec::ToJson() const {
  return {{"languages", languages},
          {"counts", {{"train", counts[0]}, {"dev", counts[1]}, {"test", counts[2]}}},
          {"min_duration_s", min_duration_s},
          {"train_crop_s", train_crop_s},
          {"lufs_min", lufs_min},
          {"lufs_max", lufs_max},
          {"peak_limit", peak_limit},
          {"activity_ratio", activity_ratio},
          {"crop_retries", crop_retries},
          {"seed", seed}};
}

DatasetSpec DatasetSpec::FromJson(const nlohmann::json& j) {
  DatasetSpec s;
  std::map<std::string, int> counts = {{"train", s.counts[0]}, {"dev", s.counts[1]}, {"test", s.counts[2]}};
  nlohmann::json counts_json = nlohmann::json::object();
  JsonReader(j, "data")
      .Field("languages", s.languages)
      .Field("counts", counts_json)
      .Field("min_duration_s", s.min_duration_s)
      .Field("train_crop_s", s.train_crop_s)
      .Field("lufs_min", s.lufs_min)
      .Field("lufs_max", s.lufs_max)
      .Field("peak_limit", s.peak_limit)
      .Field("activity_ratio", s.activity_ratio)
      .Field("crop_retries", s.crop_retries)
      .Field("seed", s.seed)
      .Finish();
  JsonReader(counts_json, "data.counts")
      .Field("train", counts["train"])
      .Field("dev", counts["dev"])
      .Field("test", counts["test"])
      .Finish();
  s.counts = {counts["train"], counts["dev"], counts["test"]};
  s.Validate();
  return s;
}

}  // namespace tle::data
