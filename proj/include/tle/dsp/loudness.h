// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DSP_LOUDNESS_H_
#define TLE_DSP_LOUDNESS_H_

#include "tle/dsp/waveform.h"

namespace tle::dsp {

// ITU-R BS.1770-4 integrated loudness of a mono signal in LUFS: K-weighting,
// 400 ms blocks at 75% overlap, -70 LUFS absolute gate and a -10 LU relative
// gate. Returns -infinity when every block is gated out. Inputs shorter than
// one block are rejected.
double IntegratedLoudness(const Waveform& w);

// Linear gain that brings `w` to `target_lufs`. Throws on silent input.
double LoudnessGain(const Waveform& w, double target_lufs);

Waveform LoudnessNormalize(const Waveform& w, double target_lufs);

}  // namespace tle::dsp

#endif  // TLE_DSP_LOUDNESS_H_
