// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_EVAL_EVALUATE_H_
#define TLE_EVAL_EVALUATE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tle/data/spec.h"
#include "tle/model/extractor.h"

namespace tle::eval {

enum class EstimateSource {
  kModel,    // extractor output
  kOracle,   // the target itself
  kMixture,  // the unprocessed mixture
};

std::string EstimateSourceName(EstimateSource s);
EstimateSource ParseEstimateSource(const std::string& name);

struct EvalConfig {
  std::vector<std::string> metrics = {"si_snr", "stoi", "pesq"};
  double max_duration_s = 60.0;  // longest mixture scored in one pass
  std::string pesq_command;      // empty: bundled provider
  int limit = 0;                 // 0 scores every manifest row

  void Validate() const;
  bool wants(const std::string& metric) const;
  nlohmann::json ToJson() const;
  static EvalConfig FromJson(const nlohmann::json& j);
};

inline const std::vector<std::string> kMetricNames = {"si_snr", "stoi", "pesq"};

struct SampleScores {
  std::string mixture_id;
  // Missing metrics were not requested; NaN marks a scoring failure.
  std::map<std::string, double> values;
};

struct MetricsReport {
  std::vector<SampleScores> rows;
  std::map<std::string, double> means;    // over finite values only
  std::map<std::string, int> excluded;    // non-finite values per metric
  std::vector<std::string> metrics;       // columns actually present
  nlohmann::json metadata = nlohmann::json::object();

  // Recomputes means and exclusion counts from the rows.
  void Aggregate();
  // Throws when aggregates disagree with the rows or `expected_rows` differs.
  void Check(std::optional<std::size_t> expected_rows = std::nullopt) const;

  nlohmann::json ToJson() const;
  static MetricsReport FromJson(const nlohmann::json& j);
};

struct EvalRequest {
  std::filesystem::path dataset_root;
  data::Split split = data::Split::kTest;
  std::string target_language = "en";
  EstimateSource source = EstimateSource::kModel;
  model::Extractor* model = nullptr;  // required for kModel
  nlohmann::json metadata = nlohmann::json::object();  // merged into the report
};

MetricsReport Evaluate(const EvalRequest& request, const EvalConfig& config);

}  // namespace tle::eval

#endif  // TLE_EVAL_EVALUATE_H_
