// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/dsp/waveform.h"

#include <algorithm>
#include <cmath>

#include "tle/util/error.h"

namespace tle::dsp {

void Waveform::Validate() const {
  if (samples.empty()) Fail("waveform is empty");
  if (sample_rate <= 0) Fail("waveform sample rate must be positive, got ", sample_rate);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) Fail("waveform sample ", i, " is not finite");
  }
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(Energy(x) / static_cast<double>(x.size()));
}

double PeakAbs(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

Waveform Scaled(const Waveform& w, double gain) {
  Waveform out = w;
  for (double& v : out.samples) v *= gain;
  return out;
}

Waveform PadOrCrop(const Waveform& w, std::size_t length) {
  Waveform out = w;
  out.samples.resize(length, 0.0);
  return out;
}

Waveform MixSources(std::span<const Waveform> sources) {
  if (sources.empty()) Fail("mix_sources: no sources given");
  const Waveform& first = sources.front();
  for (std::size_t i = 1; i < sources.size(); ++i) {
    if (sources[i].sample_rate != first.sample_rate) {
      Fail("mix_sources: source ", i, " has rate ", sources[i].sample_rate,
           " but source 0 has rate ", first.sample_rate);
    }
    if (sources[i].size() != first.size()) {
      Fail("mix_sources: source ", i, " has length ", sources[i].size(),
           " but source 0 has length ", first.size());
    }
  }
  Waveform out(std::vector<double>(first.size(), 0.0), first.sample_rate);
  for (const Waveform& s : sources) {
    for (std::size_t n = 0; n < s.size(); ++n) out.samples[n] += s.samples[n];
  }
  return out;
}

}  // namespace tle::dsp
