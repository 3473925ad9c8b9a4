// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DSP_RESAMPLE_H_
#define TLE_DSP_RESAMPLE_H_

#include <span>
#include <vector>

#include "tle/dsp/waveform.h"

namespace tle::dsp {

enum class PadMode {
  kZero,  // signal is zero outside its support
  kMean,  // signal mean is removed before filtering and restored after
};

// Symmetric Kaiser window of `length` taps.
std::vector<double> KaiserWindow(int length, double beta);

// Windowed-sinc low-pass with `cutoff` relative to Nyquist, normalized to
// unit DC gain.
std::vector<double> FirLowpass(int num_taps, double cutoff, double kaiser_beta);

// Polyphase rational resampling by up/down. Output length is
// ceil(len * up / down) with the filter delay compensated. An empty `filter`
// selects a Kaiser(beta=5) low-pass of 20 * max(up, down) + 1 taps.
std::vector<double> ResamplePoly(std::span<const double> x, int up, int down,
                                 std::span<const double> filter = {},
                                 PadMode pad = PadMode::kZero);

// Band-limited conversion to `rate` Hz. Same-rate input is returned as is.
Waveform Resample(const Waveform& w, int rate);

}  // namespace tle::dsp

#endif  // TLE_DSP_RESAMPLE_H_
