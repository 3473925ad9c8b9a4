// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_BUILDER_H_
#define TLE_DATA_BUILDER_H_

#include <array>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "tle/data/corpus.h"
#include "tle/data/manifest.h"
#include "tle/data/spec.h"

namespace tle::data {

struct BuildResult {
  std::array<std::vector<ManifestEntry>, 3> manifests;  // indexed by Split
  nlohmann::json stats;
};

// Filters, splits, pairs, mixes and crops; writes {split}.csv,
// audio/{split}/{id}/{mix,src_<lang>}.wav and stats.json under out_dir.
// Dev and test draw sources without replacement; train reuses sources only
// when its pool is smaller than the requested count.
BuildResult BuildDataset(const DatasetSpec& spec, const std::vector<CorpusEntry>& corpus,
                         const std::filesystem::path& out_dir);

// Counts, hours and unique speakers per language for each split.
nlohmann::json DatasetStats(const DatasetSpec& spec,
                            const std::array<std::vector<ManifestEntry>, 3>& manifests);

}  // namespace tle::data

#endif  // TLE_DATA_BUILDER_H_
