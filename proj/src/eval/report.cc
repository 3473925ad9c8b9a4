// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/eval/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tle/util/error.h"

namespace tle::eval {

namespace {

using Cells = std::vector<std::string>;

std::string Fixed(const MetricsReport& r, const std::string& metric) {
  auto it = r.means.find(metric);
  if (it == r.means.end() || !std::isfinite(it->second)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", it->second);
  return buf;
}

std::string Meta(const MetricsReport& r, const char* key, const std::string& fallback = "") {
  auto it = r.metadata.find(key);
  if (it == r.metadata.end() || it->is_null()) return fallback;
  return it->is_string() ? it->get<std::string>() : it->dump();
}

int SplitRank(const std::string& split) {
  static const std::map<std::string, int> rank = {{"train", 0}, {"dev", 1}, {"test", 2}};
  auto it = rank.find(split);
  return it == rank.end() ? 3 : it->second;
}

// Renders rows of cells; a one-cell row {"-"} or {"="} becomes a rule. Columns listed
// in `right` are right-aligned.
std::string Layout(const std::vector<Cells>& rows, std::size_t header_rows, const std::vector<bool>& right) {
  std::vector<std::size_t> width(right.size(), 0);
  for (const auto& row : rows) {
    if (row.size() != right.size()) continue;
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto rule = [&](char fill) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      os << std::string(width[c] + 2, fill) << (c + 1 < width.size() ? "+" : "");
    }
    os << '\n';
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Cells& row = rows[i];
    if (row.size() != right.size()) {
      rule(!row.empty() && row[0] == "=" ? '=' : '-');
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      os << ' ' << (right[c] ? pad + row[c] : row[c] + pad) << ' ' << (c + 1 < row.size() ? "|" : "");
    }
    os << '\n';
    if (i + 1 == header_rows) rule('=');
  }
  return os.str();
}

}  // namespace

std::string LanguageName(const std::string& tag) {
  static const std::map<std::string, std::string> names = {
      {"en", "English"}, {"de", "German"}, {"fr", "French"}, {"es", "Spanish"}, {"it", "Italian"}, {"nl", "Dutch"}};
  auto it = names.find(tag);
  return it == names.end() ? tag : it->second;
}

std::string RenderTable(const std::vector<MetricsReport>& reports) {
  TLE_CHECK(!reports.empty(), "render_report needs at least one report");
  std::vector<std::string> languages;
  for (const auto& r : reports) {
    const std::string lang = Meta(r, "target_language");
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) languages.push_back(lang);
  }
  std::vector<const MetricsReport*> order;
  for (const auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [&](const MetricsReport* a, const MetricsReport* b) {
    const int sa = SplitRank(Meta(*a, "split")), sb = SplitRank(Meta(*b, "split"));
    if (sa != sb) return sa < sb;
    const auto la = std::find(languages.begin(), languages.end(), Meta(*a, "target_language"));
    const auto lb = std::find(languages.begin(), languages.end(), Meta(*b, "target_language"));
    return la < lb;
  });

  std::vector<Cells> rows = {{"Set", "Target Lang", "Method", "SI-SNR (dB)", "STOI", "PESQ"}};
  std::string prev_split, prev_lang;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const MetricsReport& r = *order[i];
    const std::string split = Meta(r, "split");
    const std::string lang = Meta(r, "target_language");
    const bool new_split = i == 0 || split != prev_split;
    const bool new_lang = new_split || lang != prev_lang;
    if (i > 0 && new_split) rows.push_back({"="});
    else if (i > 0 && new_lang) rows.push_back({"-"});
    rows.push_back({new_split ? split : "", new_lang ? LanguageName(lang) : "",
                    Meta(r, "method", Meta(r, "estimate", "model")), Fixed(r, "si_snr"), Fixed(r, "stoi"),
                    Fixed(r, "pesq")});
    prev_split = split;
    prev_lang = lang;
  }
  return Layout(rows, 1, {false, false, false, true, true, true});
}

std::string RenderBetaGrid(const std::vector<MetricsReport>& reports) {
  TLE_CHECK(!reports.empty(), "render_report needs at least one report");
  std::vector<std::string> languages;
  std::map<double, std::map<std::string, const MetricsReport*>> grid;
  for (const auto& r : reports) {
    auto it = r.metadata.find("beta");
    if (it == r.metadata.end() || !it->is_number()) Fail("beta grid: every report needs a numeric metadata.beta");
    const std::string lang = Meta(r, "target_language");
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) languages.push_back(lang);
    auto& cell = grid[it->get<double>()][lang];
    if (cell != nullptr) Fail("beta grid: two reports for beta ", it->get<double>(), " and language ", lang);
    cell = &r;
  }
  Cells top = {""}, head = {"beta"};
  std::vector<bool> right = {true};
  for (const auto& lang : languages) {
    top.insert(top.end(), {LanguageName(lang), "", ""});
    head.insert(head.end(), {"SI-SNR (dB)", "STOI", "PESQ"});
    right.insert(right.end(), {true, true, true});
  }
  std::vector<Cells> rows = {top, head};
  for (const auto& [beta, by_lang] : grid) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", beta);
    Cells row = {buf};
    for (const auto& lang : languages) {
      auto it = by_lang.find(lang);
      if (it == by_lang.end()) {
        row.insert(row.end(), {"-", "-", "-"});
      } else {
        row.insert(row.end(), {Fixed(*it->second, "si_snr"), Fixed(*it->second, "stoi"), Fixed(*it->second, "pesq")});
      }
    }
    rows.push_back(row);
  }
  return Layout(rows, 2, right);
}

nlohmann::json ReportsJson(const std::vector<MetricsReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(r.ToJson());
  return out;
}

}  // namespace tle::eval
