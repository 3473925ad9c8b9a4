// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_UTIL_CONFIG_H_
#define TLE_UTIL_CONFIG_H_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tle {

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

// Overlays `patch` onto `base`. Every key in `patch` must already exist in
// `base` and carry a compatible JSON type; objects merge recursively, all
// other values replace.
void MergeStrict(nlohmann::json& base, const nlohmann::json& patch, const std::string& where = "config");

// Applies one "dotted.key=value" override. The value is parsed as JSON when
// possible and taken as a bare string otherwise.
void ApplyOverride(nlohmann::json& base, const std::string& assignment);

// defaults < file (when non-empty) < overrides, in order.
nlohmann::json ResolveConfig(nlohmann::json defaults, const std::filesystem::path& file,
                             const std::vector<std::string>& overrides);

}  // namespace tle

#endif  // TLE_UTIL_CONFIG_H_
