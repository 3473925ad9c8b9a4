// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DSP_WAVEFORM_H_
#define TLE_DSP_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tle::dsp {

// Every signal downstream of ingestion runs at this rate.
inline constexpr int kModelRate = 16000;

// Mono audio. Amplitudes are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kModelRate;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  std::span<const double> view() const { return samples; }

  // Throws unless length >= 1, rate > 0 and every sample is finite.
  void Validate() const;
};

double Energy(std::span<const double> x);
double Rms(std::span<const double> x);
double PeakAbs(std::span<const double> x);

Waveform Scaled(const Waveform& w, double gain);

// Zero-pads (or crops) to exactly `length` samples.
Waveform PadOrCrop(const Waveform& w, std::size_t length);

// Sample-wise sum of equal-length, equal-rate sources.
Waveform MixSources(std::span<const Waveform> sources);

}  // namespace tle::dsp

#endif  // TLE_DSP_WAVEFORM_H_
