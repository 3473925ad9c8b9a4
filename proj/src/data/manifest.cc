// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/data/manifest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "tle/dsp/resample.h"
#include "tle/dsp/wav_io.h"
#include "tle/util/error.h"

namespace tle::data {

namespace {

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> ParseCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string Num(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

constexpr int kFixedColumns = 6;
constexpr int kSourceColumns = 5;

}  // namespace

const ManifestSource& ManifestEntry::source(const std::string& language) const {
  for (const auto& s : sources) {
    if (s.language == language) return s;
  }
  Fail("manifest row ", mixture_id, " has no source for language '", language, "'");
}

void WriteManifestCsv(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail("cannot write manifest ", path);
  if (entries.empty()) Fail("refusing to write an empty manifest ", path);
  os << "mixture_id,split,seed,crop_offset_s,crop_length_s,mixture_wav";
  for (const auto& s : entries.front().sources) {
    const std::string& l = s.language;
    os << ',' << l << "_source," << l << "_speaker," << l << "_gain," << l << "_lufs," << l << "_wav";
  }
  os << '\n';
  for (const auto& e : entries) {
    if (e.sources.size() != entries.front().sources.size()) Fail("manifest rows disagree on source count");
    os << Quote(e.mixture_id) << ',' << SplitName(e.split) << ',' << e.seed << ','
       << Num("%.7f", e.crop_offset_s) << ',' << Num("%.7f", e.crop_length_s) << ',' << Quote(e.mixture_wav);
    for (std::size_t i = 0; i < e.sources.size(); ++i) {
      const auto& s = e.sources[i];
      if (s.language != entries.front().sources[i].language) Fail("manifest rows disagree on language order");
      os << ',' << Quote(s.source_path) << ',' << Quote(s.speaker_id) << ',' << Num("%.17g", s.gain) << ','
         << Num("%.17g", s.lufs) << ',' << Quote(s.wav);
    }
    os << '\n';
  }
}

std::vector<ManifestEntry> ReadManifestCsv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open manifest ", path);
  std::string line;
  if (!std::getline(is, line)) Fail("manifest ", path, " is empty");
  const std::vector<std::string> header = ParseCsvLine(line);
  if (header.size() < kFixedColumns || (header.size() - kFixedColumns) % kSourceColumns != 0 ||
      header[0] != "mixture_id") {
    Fail("manifest ", path, ": unexpected header");
  }
  std::vector<std::string> languages;
  for (std::size_t c = kFixedColumns; c < header.size(); c += kSourceColumns) {
    const std::string& col = header[c];
    const std::string suffix = "_source";
    if (col.size() <= suffix.size() || !col.ends_with(suffix)) Fail("manifest ", path, ": bad column ", col);
    languages.push_back(col.substr(0, col.size() - suffix.size()));
  }
  std::vector<ManifestEntry> entries;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = ParseCsvLine(line);
    if (f.size() != header.size()) Fail(path, ":", line_no, ": expected ", header.size(), " fields, got ", f.size());
    ManifestEntry e;
    try {
      e.mixture_id = f[0];
      e.split = ParseSplit(f[1]);
      e.seed = std::stoull(f[2]);
      e.crop_offset_s = std::stod(f[3]);
      e.crop_length_s = std::stod(f[4]);
      e.mixture_wav = f[5];
      for (std::size_t i = 0; i < languages.size(); ++i) {
        const std::size_t c = kFixedColumns + i * kSourceColumns;
        e.sources.push_back({languages[i], f[c], f[c + 1], std::stod(f[c + 2]), std::stod(f[c + 3]), f[c + 4]});
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& ex) {
      Fail(path, ":", line_no, ": ", ex.what());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

dsp::Waveform ReconstructMixture(const ManifestEntry& entry) {
  std::vector<dsp::Waveform> sources;
  std::size_t length = 0;
  for (const auto& s : entry.sources) {
    sources.push_back(dsp::Scaled(dsp::Resample(dsp::ReadWav(s.source_path), dsp::kModelRate), s.gain));
    length = std::max(length, sources.back().size());
  }
  for (auto& s : sources) s = dsp::PadOrCrop(s, length);
  dsp::Waveform mix = dsp::MixSources(sources);
  const auto offset = static_cast<std::size_t>(std::llround(entry.crop_offset_s * dsp::kModelRate));
  const auto count = static_cast<std::size_t>(std::llround(entry.crop_length_s * dsp::kModelRate));
  if (offset + count > mix.size()) Fail("manifest row ", entry.mixture_id, ": crop exceeds the mixture");
  return dsp::Waveform(std::vector<double>(mix.samples.begin() + offset, mix.samples.begin() + offset + count),
                       dsp::kModelRate);
}

}  // namespace tle::data
