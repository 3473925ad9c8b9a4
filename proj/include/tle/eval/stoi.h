// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_EVAL_STOI_H_
#define TLE_EVAL_STOI_H_

#include <span>
#include <vector>

#include "tle/dsp/waveform.h"

namespace tle::eval {

inline constexpr int kStoiRate = 10000;

// Short-time objective intelligibility of `estimate` against the clean
// `target`, both sampled at `rate`. Signals are resampled to 10 kHz, frames
// more than 40 dB below the loudest target frame are dropped, and the score
// averages clipped envelope correlations over 384 ms windows in 15
// third-octave bands. Throws when fewer than 30 frames remain.
double Stoi(std::span<const double> target, std::span<const double> estimate, int rate);
double Stoi(const dsp::Waveform& target, const dsp::Waveform& estimate);

// Anti-aliasing filter used for the 10 kHz conversion (p/q already reduced).
std::vector<double> StoiResampleFilter(int p, int q);

}  // namespace tle::eval

#endif  // TLE_EVAL_STOI_H_
