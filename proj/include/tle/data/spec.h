// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_SPEC_H_
#define TLE_DATA_SPEC_H_

#include <array>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace tle::data {

enum class Split { kTrain = 0, kDev = 1, kTest = 2 };
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kDev, Split::kTest};

std::string SplitName(Split s);
Split ParseSplit(const std::string& name);

// Recipe for a bilingual mixture dataset.
struct DatasetSpec {
  std::array<std::string, 2> languages = {"en", "de"};
  std::array<int, 3> counts = {30000, 4600, 4500};  // train, dev, test
  double min_duration_s = 7.0;
  double train_crop_s = 6.0;
  double lufs_min = -33.0;
  double lufs_max = -25.0;
  double peak_limit = 0.9;
  // A crop counts as active when each source's RMS inside it reaches this
  // fraction of that source's full-utterance RMS.
  double activity_ratio = 0.01;
  int crop_retries = 20;
  uint64_t seed = 0;

  int count(Split s) const { return counts[static_cast<int>(s)]; }
  void Validate() const;
  nlohmann::json ToJson() const;
  static DatasetSpec FromJson(const nlohmann::json& j);
};

}  // namespace tle::data

#endif  // TLE_DATA_SPEC_H_
