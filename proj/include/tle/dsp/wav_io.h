// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DSP_WAV_IO_H_
#define TLE_DSP_WAV_IO_H_

#include <filesystem>

#include "tle/dsp/waveform.h"

namespace tle::dsp {

// Reads mono RIFF/WAVE: PCM 16/24/32-bit or IEEE float 32-bit.
Waveform ReadWav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples are rounded to the nearest code and
// saturated at full scale.
void WriteWav(const std::filesystem::path& path, const Waveform& w);

// Value a sample takes after a 16-bit PCM round trip.
double QuantizePcm16(double v);

}  // namespace tle::dsp

#endif  // TLE_DSP_WAV_IO_H_
