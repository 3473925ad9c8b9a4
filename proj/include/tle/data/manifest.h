// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_MANIFEST_H_
#define TLE_DATA_MANIFEST_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tle/data/spec.h"
#include "tle/dsp/waveform.h"

namespace tle::data {

struct ManifestSource {
  std::string language;
  std::string source_path;  // corpus audio
  std::string speaker_id;
  double gain = 1.0;
  double lufs = 0.0;
  std::string wav;  // written source, relative to the dataset root
};

// One mixture. CSV columns, in order:
//   mixture_id, split, seed, crop_offset_s, crop_length_s, mixture_wav,
//   then per language L (in pair order): L_source, L_speaker, L_gain,
//   L_lufs, L_wav
struct ManifestEntry {
  std::string mixture_id;
  Split split = Split::kTrain;
  uint64_t seed = 0;
  double crop_offset_s = 0.0;
  double crop_length_s = 0.0;
  std::string mixture_wav;
  std::vector<ManifestSource> sources;

  const ManifestSource& source(const std::string& language) const;
};

void WriteManifestCsv(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> ReadManifestCsv(const std::filesystem::path& path);

// Re-mixes a row from the corpus audio and the recorded gains and crop.
dsp::Waveform ReconstructMixture(const ManifestEntry& entry);

}  // namespace tle::data

#endif  // TLE_DATA_MANIFEST_H_
