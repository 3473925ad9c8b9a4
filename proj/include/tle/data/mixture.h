// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_MIXTURE_H_
#define TLE_DATA_MIXTURE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tle/data/corpus.h"
#include "tle/data/spec.h"
#include "tle/dsp/waveform.h"

namespace tle::data {

struct SourceInfo {
  std::string language;
  std::string path;
  std::string speaker_id;
  double lufs = 0.0;      // drawn loudness target
  double gain = 1.0;      // linear gain applied to the 16 kHz source
  std::size_t num_samples = 0;  // 16 kHz length before padding
  double full_rms = 0.0;  // RMS of the scaled, unpadded source
};

struct MixtureSample {
  dsp::Waveform mixture;
  std::vector<dsp::Waveform> sources;  // scaled and padded, aligned with `info`
  std::vector<SourceInfo> info;
  uint64_t seed = 0;
  std::size_t crop_offset = 0;  // samples into the uncropped mixture

  const dsp::Waveform& source(const std::string& language) const;
};

// Resamples both sources to 16 kHz, normalizes each to an independently
// drawn loudness in [lufs_min, lufs_max], zero-pads to the longer one and
// sums. When any peak exceeds peak_limit both gains are scaled down
// together. The mixture is exactly gain_a * a + gain_b * b.
MixtureSample PairAndMix(const CorpusEntry& a, const dsp::Waveform& audio_a, const CorpusEntry& b,
                         const dsp::Waveform& audio_b, const DatasetSpec& spec, uint64_t seed);

// RMS of every source inside the window, relative to its full RMS; the
// smallest ratio decides whether the window is active.
double MinActivityRatio(const MixtureSample& m, std::size_t offset, std::size_t length);

// Draws a window of `length_s` seconds uniformly, keeping the first draw in
// which every source is active. After spec.crop_retries failures it takes
// the window with the highest minimum activity on a 0.1 s grid.
MixtureSample CropTrainSegment(const MixtureSample& m, double length_s, const DatasetSpec& spec,
                               uint64_t seed);

}  // namespace tle::data

#endif  // TLE_DATA_MIXTURE_H_
