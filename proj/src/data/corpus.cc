// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/data/corpus.h"

#include <fstream>
#include <set>
#include <sstream>

#include "tle/util/error.h"
#include "tle/util/rng.h"

namespace tle::data {

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

}  // namespace

std::vector<CorpusEntry> ReadCorpusTsv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open corpus manifest ", path);
  std::string line;
  if (!std::getline(is, line)) Fail("corpus manifest ", path, " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitTabs(line);
  int col_path = -1, col_speaker = -1, col_duration = -1, col_language = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "path") col_path = i;
    else if (header[i] == "speaker_id") col_speaker = i;
    else if (header[i] == "duration") col_duration = i;
    else if (header[i] == "language") col_language = i;
  }
  if (col_path < 0 || col_speaker < 0 || col_duration < 0 || col_language < 0) {
    Fail("corpus manifest ", path, ": header must name path, speaker_id, duration and language");
  }
  const std::filesystem::path base = std::filesystem::absolute(path).parent_path();
  std::vector<CorpusEntry> entries;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitTabs(line);
    if (f.size() != header.size()) Fail(path, ":", line_no, ": expected ", header.size(), " fields");
    CorpusEntry e;
    std::filesystem::path p = f[col_path];
    e.path = (p.is_absolute() ? p : base / p).lexically_normal().string();
    e.speaker_id = f[col_speaker];
    e.language = f[col_language];
    try {
      e.duration = std::stod(f[col_duration]);
    } catch (const std::exception&) {
      Fail(path, ":", line_no, ": bad duration '", f[col_duration], "'");
    }
    if (!(e.duration > 0.0)) Fail(path, ":", line_no, ": duration must be positive");
    if (e.speaker_id.empty()) Fail(path, ":", line_no, ": empty speaker_id");
    entries.push_back(std::move(e));
  }
  return entries;
}

void WriteCorpusTsv(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail("cannot write ", path);
  os << "path\tspeaker_id\tduration\tlanguage\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%.6f", e.duration);
    os << e.path << '\t' << e.speaker_id << '\t' << buf << '\t' << e.language << '\n';
  }
}

std::vector<CorpusEntry> FilterCorpus(const std::vector<CorpusEntry>& entries, double min_duration) {
  std::vector<CorpusEntry> out;
  std::set<std::string> languages;
  for (const auto& e : entries) {
    languages.insert(e.language);
    if (e.duration >= min_duration) out.push_back(e);
  }
  if (out.empty()) {
    std::string names;
    for (const auto& l : languages) names += (names.empty() ? "" : ",") + l;
    Fail("filter_corpus: no utterances of language '", names, "' are at least ", min_duration, " s long");
  }
  return out;
}

SplitAssignment AssignSplits(const std::vector<CorpusEntry>& entries, const DatasetSpec& spec) {
  std::vector<std::string> speakers;
  std::map<std::string, std::vector<const CorpusEntry*>> by_speaker;
  for (const auto& e : entries) {
    if (e.speaker_id.empty()) Fail("assign_splits: entry ", e.path, " has no speaker_id");
    auto [it, inserted] = by_speaker.try_emplace(e.speaker_id);
    if (inserted) speakers.push_back(e.speaker_id);
    it->second.push_back(&e);
  }
  if (speakers.size() < 3) {
    Fail("assign_splits: need at least 3 speakers to populate train/dev/test, found ", speakers.size());
  }
  Rng rng(DeriveSeed(spec.seed, "assign_splits"));
  rng.Shuffle(speakers);

  std::set<std::string> languages;
  for (const auto& e : entries) languages.insert(e.language);

  SplitAssignment out;
  std::array<std::map<std::string, int>, 3> have;
  auto satisfied = [&](Split s) {
    for (const auto& lang : languages) {
      if (have[static_cast<int>(s)][lang] < spec.count(s)) return false;
    }
    return true;
  };
  auto needs = [&](Split s, const std::string& spk) {
    for (const CorpusEntry* e : by_speaker[spk]) {
      if (have[static_cast<int>(s)][e->language] < spec.count(s)) return true;
    }
    return false;
  };
  std::size_t unassigned = speakers.size();
  // Dev and test take speakers whose languages are still short; train keeps
  // the remainder and always at least one speaker.
  for (Split s : {Split::kDev, Split::kTest}) {
    for (const std::string& spk : speakers) {
      if (satisfied(s) || unassigned <= 1) break;
      if (out.speaker_split.count(spk) || !needs(s, spk)) continue;
      out.speaker_split[spk] = s;
      --unassigned;
      for (const CorpusEntry* e : by_speaker[spk]) ++have[static_cast<int>(s)][e->language];
    }
  }
  for (const auto& spk : speakers) out.speaker_split.try_emplace(spk, Split::kTrain);

  for (const auto& e : entries) out.entries[static_cast<int>(out.speaker_split.at(e.speaker_id))].push_back(e);
  for (Split s : kAllSplits) {
    if (out.of(s).empty()) {
      Fail("assign_splits: insufficient speakers, split ", SplitName(s), " received no utterances");
    }
  }
  return out;
}

}  // namespace tle::data
