// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_EVAL_REPORT_H_
#define TLE_EVAL_REPORT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tle/eval/evaluate.h"

namespace tle::eval {

// "en" -> "English"; unknown tags are returned unchanged.
std::string LanguageName(const std::string& tag);

// Set | Target Lang | Method | SI-SNR (dB) | STOI | PESQ, grouped by split
// then language. Reads metadata keys split, target_language and method.
std::string RenderTable(const std::vector<MetricsReport>& reports);

// One row per metadata "beta" value, one SI-SNR/STOI/PESQ column group per
// target language.
std::string RenderBetaGrid(const std::vector<MetricsReport>& reports);

nlohmann::json ReportsJson(const std::vector<MetricsReport>& reports);

}  // namespace tle::eval

#endif  // TLE_EVAL_REPORT_H_
