// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/dsp/loudness.h"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tle/util/error.h"

namespace tle::dsp {

namespace {

constexpr double kBlockSeconds = 0.4;
constexpr double kBlockStep = 0.25;  // 75% overlap
constexpr double kAbsoluteGate = -70.0;
constexpr double kRelativeGate = -10.0;

struct Biquad {
  std::array<double, 3> b;
  std::array<double, 3> a;  // a[0] == 1

  void Apply(std::vector<double>& x) const {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& v : x) {
      const double y = b[0] * v + b[1] * x1 + b[2] * x2 - a[1] * y1 - a[2] * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  }
};

// RBJ cookbook designs of the two K-weighting stages.
Biquad HighShelf(double gain_db, double q, double fc, double rate) {
  const double A = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * std::numbers::pi * (fc / rate);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0), sa = 2.0 * std::sqrt(A) * alpha;
  const double b0 = A * ((A + 1) + (A - 1) * c + sa);
  const double b1 = -2 * A * ((A - 1) + (A + 1) * c);
  const double b2 = A * ((A + 1) + (A - 1) * c - sa);
  const double a0 = (A + 1) - (A - 1) * c + sa;
  const double a1 = 2 * ((A - 1) - (A + 1) * c);
  const double a2 = (A + 1) - (A - 1) * c - sa;
  return {{b0 / a0, b1 / a0, b2 / a0}, {1.0, a1 / a0, a2 / a0}};
}

Biquad HighPass(double q, double fc, double rate) {
  const double w0 = 2.0 * std::numbers::pi * (fc / rate);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1 + alpha;
  return {{(1 + c) / 2 / a0, -(1 + c) / a0, (1 + c) / 2 / a0},
          {1.0, -2 * c / a0, (1 - alpha) / a0}};
}

double BlockLoudness(double mean_square) {
  return -0.691 + 10.0 * std::log10(mean_square);
}

}  // namespace

double IntegratedLoudness(const Waveform& w) {
  w.Validate();
  const double rate = w.sample_rate;
  const double duration = w.duration();
  if (duration < kBlockSeconds) {
    Fail("loudness: signal of ", duration, " s is shorter than one ",
         kBlockSeconds, " s gating block");
  }
  std::vector<double> x = w.samples;
  HighShelf(4.0, 1.0 / std::sqrt(2.0), 1500.0, rate).Apply(x);
  HighPass(0.5, 38.0, rate).Apply(x);

  const auto num_blocks = static_cast<long>(
      std::round((duration - kBlockSeconds) / (kBlockSeconds * kBlockStep))) + 1;
  std::vector<double> z(num_blocks), l(num_blocks);
  for (long j = 0; j < num_blocks; ++j) {
    const auto lo = static_cast<long>(kBlockSeconds * (j * kBlockStep) * rate);
    auto hi = static_cast<long>(kBlockSeconds * (j * kBlockStep + 1) * rate);
    hi = std::min<long>(hi, static_cast<long>(x.size()));
    double acc = 0.0;
    for (long n = lo; n < hi; ++n) acc += x[n] * x[n];
    z[j] = acc / (kBlockSeconds * rate);
    l[j] = BlockLoudness(z[j]);
  }

  auto gated_mean = [&](double threshold, bool strict) {
    double sum = 0.0;
    long count = 0;
    for (long j = 0; j < num_blocks; ++j) {
      const bool pass = strict ? (l[j] > threshold && l[j] > kAbsoluteGate)
                               : (l[j] >= threshold);
      if (pass) {
        sum += z[j];
        ++count;
      }
    }
    return count == 0 ? 0.0 : sum / count;
  };

  const double abs_mean = gated_mean(kAbsoluteGate, false);
  if (abs_mean == 0.0) return -std::numeric_limits<double>::infinity();
  const double relative_threshold = BlockLoudness(abs_mean) + kRelativeGate;
  const double rel_mean = gated_mean(relative_threshold, true);
  if (rel_mean == 0.0) return -std::numeric_limits<double>::infinity();
  return BlockLoudness(rel_mean);
}

double LoudnessGain(const Waveform& w, double target_lufs) {
  const double measured = IntegratedLoudness(w);
  if (!std::isfinite(measured)) {
    Fail("loudness_normalize: input is silent (all gating blocks below ",
         kAbsoluteGate, " LUFS)");
  }
  return std::pow(10.0, (target_lufs - measured) / 20.0);
}

Waveform LoudnessNormalize(const Waveform& w, double target_lufs) {
  return Scaled(w, LoudnessGain(w, target_lufs));
}

}  // namespace tle::dsp
