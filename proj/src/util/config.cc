// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/util/config.h"

#include <fstream>

#include "tle/util/error.h"

namespace tle {

namespace {

bool Compatible(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) {
    return !(a.is_number_integer() && b.is_number_float());
  }
  return a.type() == b.type();
}

}  // namespace

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open config file ", path);
  try {
    return nlohmann::json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    Fail("cannot parse ", path, ": ", e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail("cannot write ", path);
  os << j.dump(2) << '\n';
}

void MergeStrict(nlohmann::json& base, const nlohmann::json& patch, const std::string& where) {
  if (!patch.is_object()) Fail(where, ": expected a JSON object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where + "." + key;
    auto it = base.find(key);
    if (it == base.end()) Fail("unknown config key '", path, "'");
    if (it->is_object()) {
      MergeStrict(*it, value, path);
    } else if (!Compatible(*it, value)) {
      Fail("config key '", path, "' expects ", it->type_name(), ", got ", value.type_name());
    } else {
      *it = value;
    }
  }
}

void ApplyOverride(nlohmann::json& base, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) Fail("override '", assignment, "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json patch = value;
  std::size_t end = key.size();
  while (true) {
    const auto dot = key.rfind('.', end - 1);
    const std::size_t start = dot == std::string::npos ? 0 : dot + 1;
    if (start == end) Fail("override '", assignment, "' has an empty key segment");
    patch = nlohmann::json{{key.substr(start, end - start), patch}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  MergeStrict(base, patch);
}

nlohmann::json ResolveConfig(nlohmann::json defaults, const std::filesystem::path& file,
                             const std::vector<std::string>& overrides) {
  if (!file.empty()) MergeStrict(defaults, ReadJsonFile(file));
  for (const auto& o : overrides) ApplyOverride(defaults, o);
  return defaults;
}

}  // namespace tle
