// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DATA_TOY_CORPUS_H_
#define TLE_DATA_TOY_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tle/data/corpus.h"
#include "tle/dsp/waveform.h"

namespace tle::data {

// Synthetic stand-in for a two-language read-speech corpus. Each language
// has its own vowel formant table, syllable rate and consonant mix; each
// speaker has a pitch and vocal-tract scale.
struct ToyCorpusSpec {
  std::array<std::string, 2> languages = {"en", "de"};
  int utterances_per_language = 40;
  int speakers_per_language = 20;
  double min_duration_s = 6.0;
  double max_duration_s = 12.0;
  int sample_rate = 48000;
  uint64_t seed = 0;
};

// Syllable-structured harmonic signal with formant resonances, consonant
// noise bursts and pauses.
dsp::Waveform SynthesizeUtterance(const std::string& language, int speaker, double duration_s,
                                  int sample_rate, uint64_t seed);

// Writes every utterance as a WAV under dir plus dir/corpus.tsv.
std::vector<CorpusEntry> SynthesizeToyCorpus(const ToyCorpusSpec& spec, const std::filesystem::path& dir);

}  // namespace tle::data

#endif  // TLE_DATA_TOY_CORPUS_H_
