// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_CORPUS_H_
#define TLE_DATA_CORPUS_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tle/data/spec.h"

namespace tle::data {

struct CorpusEntry {
  std::string path;
  std::string speaker_id;  // corpus client identifier
  double duration = 0.0;   // seconds
  std::string language;
};

// Tab-separated with a header naming the columns path, speaker_id, duration
// and language (any order). Relative paths resolve against the file's
// directory.
std::vector<CorpusEntry> ReadCorpusTsv(const std::filesystem::path& path);
void WriteCorpusTsv(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries);

// Entries with duration >= min_duration, in input order. Throws (naming the
// language) when nothing survives.
std::vector<CorpusEntry> FilterCorpus(const std::vector<CorpusEntry>& entries, double min_duration);

struct SplitAssignment {
  std::map<std::string, Split> speaker_split;
  std::array<std::vector<CorpusEntry>, 3> entries;  // indexed by Split

  const std::vector<CorpusEntry>& of(Split s) const { return entries[static_cast<int>(s)]; }
};

// Speaker-disjoint train/dev/test partition. Speakers are visited in a
// seeded random order and given to dev until every language has at least
// the dev count of utterances, then likewise to test; the rest go to train.
// A speaker id keeps one split across all languages.
SplitAssignment AssignSplits(const std::vector<CorpusEntry>& entries, const DatasetSpec& spec);

}  // namespace tle::data

#endif  // TLE_DATA_CORPUS_H_
