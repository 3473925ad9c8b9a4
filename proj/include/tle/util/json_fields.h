// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_UTIL_JSON_FIELDS_H_
#define TLE_UTIL_JSON_FIELDS_H_

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "tle/util/error.h"

namespace tle {

// Reads optional fields out of a JSON object into a struct, rejecting keys
// the struct does not know about.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) Fail(where_, ": expected a JSON object");
  }

  template <typename T>
  JsonReader& Field(const char* key, T& out) {
    known_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        out = it->get<T>();
      } catch (const nlohmann::json::exception& e) {
        Fail(where_, ".", key, ": ", e.what());
      }
    }
    return *this;
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.count(key)) Fail(where_, ": unknown key '", key, "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> known_;
};

}  // namespace tle

#endif  // TLE_UTIL_JSON_FIELDS_H_
